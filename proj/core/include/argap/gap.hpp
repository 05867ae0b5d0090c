#pragma once

#include <cstdint>
#include <vector>

#include "argap/clustering.hpp"
#include "argap/mixture.hpp"
#include "argap/sampler.hpp"

namespace argap {

// Model-independent reference curve: values[M-1] is the mean over instances
// of log W_M, where W_M = (1/F) * WCSD of k-medoids over F uniform stable
// filters (sigma2 = 1) plus the noise-floor "+1".  W_F would be exactly 1,
// so values are nonnegative and non-increasing in M.
struct ReferenceCurve {
    int lag = 0;
    int m_max = 0;
    std::vector<double> values;  // log W_M for M = 1..m_max
    int n_filters = 0;
    int n_instances = 0;
    std::uint64_t seed = 0;

    // First m entries as a standalone curve (m <= m_max).
    ReferenceCurve truncated(int m) const;
};

struct ReferenceCurveOptions {
    int clustering_restarts = 20;
    int n_threads = 1;
};

ReferenceCurve reference_curve(int lag, int m_max, int n_filters, int n_instances,
                               std::uint64_t rng_seed, const ConfigurationWeights& weights,
                               const ReferenceCurveOptions& options = {});

struct EmConfig {
    int max_iter = 500;
    double tol = 1e-6;
    int n_restarts = 10;
};

// Per-M EM fits of the observed series.  The curve value is the
// classification MSPE (posterior-assigned mode per point);
// log_mspe[M-1] = log max(mspe[M-1], 1e-300).  The raw per-point-minimum
// MSPE is kept alongside for inspection.
struct EmpiricalCurve {
    std::vector<double> log_mspe;
    std::vector<double> mspe;      // classification MSPE, drives selection
    std::vector<double> mspe_min;  // per-point-minimum MSPE
    std::vector<FitResult> fits;
};

EmpiricalCurve empirical_curve(const TimeSeries& series, int m_max, const EmConfig& config,
                               std::uint64_t rng_seed);

struct GapResult {
    ReferenceCurve reference;
    std::vector<double> empirical;  // log MSPE per M
    std::vector<double> gaps;       // reference - empirical
    int selected_m = 0;
    int aic_m = 0;
    int bic_m = 0;
};

// Largest-gap selection; ties go to the smallest M.  aic_m/bic_m stay 0 here;
// gap_analysis fills them.  Throws LengthMismatch on unequal curve lengths.
GapResult select_m_gap(const ReferenceCurve& reference, const std::vector<double>& empirical);

// argmin of the criterion over fits for M = 1..m_max, ties to the smallest M.
int select_m_aic(const std::vector<FitResult>& fits, int n_obs);
int select_m_bic(const std::vector<FitResult>& fits, int n_obs);

struct GapAnalysis {
    GapResult result;
    EmpiricalCurve curve;
};

// Full pipeline on one series: empirical curve, gap selection against the
// (possibly truncated) reference, and the AIC/BIC baselines.
GapAnalysis gap_analysis(const TimeSeries& series, const ReferenceCurve& reference, int m_max,
                         const EmConfig& config, std::uint64_t rng_seed);

}  // namespace argap
