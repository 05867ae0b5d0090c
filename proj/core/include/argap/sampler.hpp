#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "argap/filter.hpp"
#include "argap/rng.hpp"

namespace argap {

// Monte Carlo estimates of Vol(R_L^(c)) for c = 0..floor(L/2), where
// R_L^(c) is the set of stable degree-L coefficient vectors with exactly c
// conjugate complex root pairs.  Normalized, these drive the multinomial
// configuration draw of the uniform stable-filter sampler.
struct ConfigurationWeights {
    int order = 0;
    std::vector<double> volumes;          // index c
    std::vector<double> standard_errors;  // Monte Carlo SEs, same shape
    std::int64_t n_samples = 0;

    // Volumes normalized to probabilities (sum 1); zero-volume entries stay 0.
    std::vector<double> normalized() const;
    double total_volume() const;
};

inline constexpr std::int64_t kRejectionBudget = 10'000'000;
inline constexpr std::uint64_t kDefaultVolumeSeed = 424242;

std::int64_t default_volume_samples(int order);  // 1e6 for L <= 4, else 1e7

// Vol(R_L^(c)) ~= pi^c 2^(L-2c) / (c! (L-2c)!) * E|Vandermonde| with the
// expectation taken over uniform draws from C_1^c x S_1^(L-2c).
ConfigurationWeights estimate_configuration_volumes(int order, std::int64_t n_samples,
                                                    std::uint64_t rng_seed);

// Root set with density proportional to |Vandermonde| on the configuration
// (order, c), by joint rejection against the bound 2^(L(L-1)/2).
// Throws RejectionBudgetExceeded after kRejectionBudget proposals.
RootSet sample_roots(int order, int n_complex_pairs, std::uint64_t rng_seed);
RootSet sample_roots(int order, int n_complex_pairs, Rng& rng);

// Uniform draw from R_L: multinomial configuration by normalized volumes,
// |Vandermonde|-density roots, then the coefficient map.
Filter sample_uniform_stable_filter(int order, const ConfigurationWeights& weights,
                                    std::uint64_t rng_seed);
Filter sample_uniform_stable_filter(int order, const ConfigurationWeights& weights, Rng& rng);

// Independent oracle: exact uniform sampling on R_L by rejection from the
// coefficient bounding box |lambda_k| <= binomial(L, k).  Practical for
// L <= 8 only.
Filter sample_coefficient_rejection(int order, std::uint64_t rng_seed);
Filter sample_coefficient_rejection(int order, Rng& rng);

// Memoized volume estimates, persisted as JSON under cache_dir (or the
// ARGAP_CACHE_DIR environment variable when unset).  n_samples == 0 picks
// default_volume_samples(order).  Same key -> bit-identical weights whether
// computed or reloaded.
ConfigurationWeights cached_volumes(int order, std::int64_t n_samples = 0,
                                    std::uint64_t rng_seed = kDefaultVolumeSeed,
                                    std::optional<std::string> cache_dir = std::nullopt);

}  // namespace argap
