#include "argap/sampler.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "argap/errors.hpp"

namespace argap {

namespace {

constexpr int kMaxOrder = 8;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

void check_order(int order) {
    if (order < 1 || order > kMaxOrder)
        throw std::invalid_argument("order must be in [1, " + std::to_string(kMaxOrder) + "]");
}

// |Vandermonde| of the multiset (x_i +- j y_i for i < c, then reals).
// Accumulates squared magnitudes and takes one square root; the hot loop of
// both volume estimation and rejection sampling.
double abs_vandermonde(std::span<const std::complex<double>> roots) {
    double prod = 1.0;
    for (std::size_t u = 0; u < roots.size(); ++u)
        for (std::size_t w = u + 1; w < roots.size(); ++w) prod *= std::norm(roots[w] - roots[u]);
    return std::sqrt(prod);
}

struct Proposal {
    std::array<std::complex<double>, kMaxOrder> roots;
    std::array<double, kMaxOrder / 2> xs, ys;
    std::array<double, kMaxOrder> reals;
};

// One uniform draw from C_1^c x S_1^(L-2c); returns |Vandermonde| of the
// expanded multiset.
double propose(Rng& rng, int order, int c, Proposal& p) {
    int idx = 0;
    for (int i = 0; i < c; ++i) {
        auto [x, y] = rng.unit_disk();
        p.xs[i] = x;
        p.ys[i] = y;
        p.roots[idx++] = {x, -y};
        p.roots[idx++] = {x, y};
    }
    for (int i = 0; i < order - 2 * c; ++i) {
        const double r = rng.uniform(-1.0, 1.0);
        p.reals[i] = r;
        p.roots[idx++] = {r, 0.0};
    }
    return abs_vandermonde(std::span<const std::complex<double>>(p.roots.data(),
                                                                 static_cast<std::size_t>(order)));
}

RootSet to_root_set(const Proposal& p, int order, int c) {
    std::vector<ComplexPair> pairs;
    pairs.reserve(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) pairs.push_back({p.xs[i], std::abs(p.ys[i])});
    std::vector<double> reals(p.reals.begin(), p.reals.begin() + (order - 2 * c));
    return RootSet(std::move(pairs), std::move(reals));
}

}  // namespace

std::vector<double> ConfigurationWeights::normalized() const {
    const double total = total_volume();
    if (!(total > 0.0)) throw std::invalid_argument("configuration volumes are all zero");
    std::vector<double> w(volumes.size());
    for (std::size_t i = 0; i < volumes.size(); ++i) w[i] = volumes[i] / total;
    return w;
}

double ConfigurationWeights::total_volume() const {
    double total = 0.0;
    for (double v : volumes) total += v;
    return total;
}

std::int64_t default_volume_samples(int order) { return order <= 4 ? 1'000'000 : 10'000'000; }

ConfigurationWeights estimate_configuration_volumes(int order, std::int64_t n_samples,
                                                    std::uint64_t rng_seed) {
    check_order(order);
    if (n_samples < 1000) throw std::invalid_argument("n_samples must be >= 1000");

    ConfigurationWeights out;
    out.order = order;
    out.n_samples = n_samples;
    const int c_max = order / 2;
    for (int c = 0; c <= c_max; ++c) {
        Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(c)));
        const int n_real = order - 2 * c;
        const double prefactor = std::pow(std::numbers::pi, c) * std::pow(2.0, n_real) /
                                 (factorial(c) * factorial(n_real));
        Proposal p;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n_samples; ++i) {
            const double v = propose(rng, order, c, p);
            sum += v;
            sum_sq += v * v;
        }
        const double n = static_cast<double>(n_samples);
        const double mean = sum / n;
        const double var = std::max(0.0, sum_sq / n - mean * mean);
        out.volumes.push_back(prefactor * mean);
        out.standard_errors.push_back(prefactor * std::sqrt(var / n));
    }
    return out;
}

RootSet sample_roots(int order, int n_complex_pairs, Rng& rng) {
    check_order(order);
    if (n_complex_pairs < 0 || 2 * n_complex_pairs > order)
        throw std::invalid_argument("n_complex_pairs must be in [0, floor(L/2)]");

    const double bound = std::pow(2.0, order * (order - 1) / 2);
    Proposal p;
    for (std::int64_t trial = 0; trial < kRejectionBudget; ++trial) {
        const double v = propose(rng, order, n_complex_pairs, p);
        bool valid = true;
        for (int i = 0; i < n_complex_pairs; ++i)
            if (p.ys[i] == 0.0) valid = false;  // degenerate pair, measure zero
        if (valid && rng.uniform01() * bound < v) return to_root_set(p, order, n_complex_pairs);
    }
    throw RejectionBudgetExceeded("no Vandermonde-density acceptance within " +
                                  std::to_string(kRejectionBudget) + " proposals");
}

RootSet sample_roots(int order, int n_complex_pairs, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return sample_roots(order, n_complex_pairs, rng);
}

Filter sample_uniform_stable_filter(int order, const ConfigurationWeights& weights, Rng& rng) {
    check_order(order);
    if (weights.order != order) throw std::invalid_argument("weights.order does not match order");
    const auto probs = weights.normalized();

    const double u = rng.uniform01();
    int c = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum || i + 1 == probs.size()) {
            c = static_cast<int>(i);
            break;
        }
    }
    // Zero-weight configurations are skipped by construction (their
    // cumulative span is empty); a trailing round-off tie lands on the
    // last configuration with positive weight.
    if (probs[static_cast<std::size_t>(c)] == 0.0) {
        for (int i = static_cast<int>(probs.size()) - 1; i >= 0; --i)
            if (probs[static_cast<std::size_t>(i)] > 0.0) {
                c = i;
                break;
            }
    }
    return roots_to_coefficients(sample_roots(order, c, rng));
}

Filter sample_uniform_stable_filter(int order, const ConfigurationWeights& weights,
                                    std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return sample_uniform_stable_filter(order, weights, rng);
}

Filter sample_coefficient_rejection(int order, Rng& rng) {
    check_order(order);
    std::vector<double> psi(static_cast<std::size_t>(order));
    for (std::int64_t trial = 0; trial < kRejectionBudget; ++trial) {
        for (int k = 1; k <= order; ++k) {
            const double b = binomial(order, k);
            psi[static_cast<std::size_t>(k - 1)] = -rng.uniform(-b, b);  // psi = -lambda
        }
        if (is_stable(psi)) return Filter(psi);
    }
    throw RejectionBudgetExceeded("no stable coefficient draw within " +
                                  std::to_string(kRejectionBudget) + " proposals");
}

Filter sample_coefficient_rejection(int order, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return sample_coefficient_rejection(order, rng);
}

namespace {

std::mutex cache_mutex;
std::map<std::tuple<int, std::int64_t, std::uint64_t>, ConfigurationWeights> memo_cache;

std::optional<std::filesystem::path> cache_file(const std::optional<std::string>& dir, int order,
                                                std::int64_t n_samples, std::uint64_t seed) {
    std::string base;
    if (dir) {
        base = *dir;
    } else if (const char* env = std::getenv("ARGAP_CACHE_DIR")) {
        base = env;
    } else {
        return std::nullopt;
    }
    if (base.empty()) return std::nullopt;
    char name[128];
    std::snprintf(name, sizeof(name), "argap_volumes_L%d_n%lld_s%llu.json", order,
                  static_cast<long long>(n_samples), static_cast<unsigned long long>(seed));
    return std::filesystem::path(base) / name;
}

std::optional<ConfigurationWeights> load_cache(const std::filesystem::path& path, int order,
                                               std::int64_t n_samples) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(in);
        ConfigurationWeights w;
        w.order = j.at("order").get<int>();
        w.n_samples = j.at("n_samples").get<std::int64_t>();
        w.volumes = j.at("volumes").get<std::vector<double>>();
        w.standard_errors = j.at("standard_errors").get<std::vector<double>>();
        if (w.order != order || w.n_samples != n_samples ||
            w.volumes.size() != static_cast<std::size_t>(order / 2 + 1))
            return std::nullopt;
        return w;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

void store_cache(const std::filesystem::path& path, const ConfigurationWeights& w,
                 std::uint64_t seed) {
    nlohmann::json j{{"order", w.order},
                     {"n_samples", w.n_samples},
                     {"seed", seed},
                     {"volumes", w.volumes},
                     {"standard_errors", w.standard_errors}};
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    const auto tmp = path.string() + ".tmp";
    std::ofstream out(tmp);
    if (!out) {
        std::fprintf(stderr, "argap: could not write volume cache %s\n", path.string().c_str());
        return;
    }
    out << j.dump() << '\n';
    out.close();
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::fprintf(stderr, "argap: could not write volume cache %s\n", path.string().c_str());
}

}  // namespace

ConfigurationWeights cached_volumes(int order, std::int64_t n_samples, std::uint64_t rng_seed,
                                    std::optional<std::string> cache_dir) {
    check_order(order);
    if (n_samples == 0) n_samples = default_volume_samples(order);

    const auto key = std::make_tuple(order, n_samples, rng_seed);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        const auto it = memo_cache.find(key);
        if (it != memo_cache.end()) return it->second;
    }

    const auto path = cache_file(cache_dir, order, n_samples, rng_seed);
    if (path) {
        if (auto loaded = load_cache(*path, order, n_samples)) {
            std::lock_guard<std::mutex> lock(cache_mutex);
            memo_cache[key] = *loaded;
            return *loaded;
        }
    }

    const auto computed = estimate_configuration_volumes(order, n_samples, rng_seed);
    if (path) store_cache(*path, computed, rng_seed);
    std::lock_guard<std::mutex> lock(cache_mutex);
    memo_cache[key] = computed;
    return computed;
}

}  // namespace argap
