#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace argap {

// SplitMix64 finalizer; used both as a hash and as the seed-splitting rule.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Documented splitting rule for fanning one base seed out to independent
// streams (restarts, replications, workers): stream k gets
// splitmix64(seed + golden * (k + 1)).  Streams are decorrelated and the
// mapping is stable across platforms, so parallel schedules cannot change
// results.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Seeded generator with hand-rolled variate mappings.  std:: distributions
// are implementation-defined, which would break bit-exact reproducibility;
// everything here is pinned to the mt19937_64 output stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n); n >= 1.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = (UINT64_MAX / n) * n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<std::size_t>(x % n);
    }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform on the open unit disk, by rejection from the square.
    std::pair<double, double> unit_disk() {
        for (;;) {
            const double x = uniform(-1.0, 1.0);
            const double y = uniform(-1.0, 1.0);
            if (x * x + y * y < 1.0) return {x, y};
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace argap
