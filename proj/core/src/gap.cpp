#include "argap/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "argap/errors.hpp"
#include "argap/parallel.hpp"
#include "argap/rng.hpp"

namespace argap {

namespace {

constexpr double kMspeFloor = 1e-300;

// Best single medoid to append to an existing set: minimizes the augmented
// objective in one O(n^2) pass.
int best_addition(const DistanceTable& table, const std::vector<int>& medoids) {
    const int n = table.size();
    std::vector<double> d1(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int id : medoids)
        for (int j = 0; j < n; ++j)
            d1[static_cast<std::size_t>(j)] = std::min(d1[static_cast<std::size_t>(j)], table.entry(id, j));

    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int h = 0; h < n; ++h) {
        if (std::find(medoids.begin(), medoids.end(), h) != medoids.end()) continue;
        double cost = 0.0;
        for (int j = 0; j < n; ++j) cost += std::min(d1[static_cast<std::size_t>(j)], table.entry(h, j));
        if (cost < best_cost) {
            best_cost = cost;
            best = h;
        }
    }
    return best;
}

// log W_M for M = 1..m_max on one filter sample.  Each M is solved by
// restarted k-medoids and additionally warm-started from the previous M's
// medoids plus the best extra medoid, which keeps the per-instance W_M
// sequence non-increasing.
std::vector<double> instance_curve(const DistanceTable& table, int m_max, int n_filters,
                                   std::uint64_t seed, int restarts) {
    std::vector<double> logs(static_cast<std::size_t>(m_max));
    std::vector<int> prev_medoids;
    for (int m = 1; m <= m_max; ++m) {
        ClusteringResult best =
            k_medoids(table, m, derive_seed(seed, static_cast<std::uint64_t>(m)), restarts);
        if (m > 1 && static_cast<int>(prev_medoids.size()) == m - 1) {
            std::vector<int> warm = prev_medoids;
            const int extra = best_addition(table, warm);
            if (extra >= 0) {
                warm.push_back(extra);
                ClusteringResult chained = k_medoids_refine(table, std::move(warm));
                if (chained.wcsd < best.wcsd) best = std::move(chained);
            }
        }
        prev_medoids = best.medoid_indices;
        const double w_m = best.wcsd / n_filters + 1.0;
        logs[static_cast<std::size_t>(m - 1)] = std::log(w_m);
    }
    return logs;
}

}  // namespace

ReferenceCurve ReferenceCurve::truncated(int m) const {
    if (m < 1 || m > m_max) throw std::invalid_argument("truncation length out of range");
    ReferenceCurve out = *this;
    out.m_max = m;
    out.values.resize(static_cast<std::size_t>(m));
    return out;
}

ReferenceCurve reference_curve(int lag, int m_max, int n_filters, int n_instances,
                               std::uint64_t rng_seed, const ConfigurationWeights& weights,
                               const ReferenceCurveOptions& options) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    if (n_filters < m_max) throw std::invalid_argument("need at least m_max filters");
    if (n_instances < 1) throw std::invalid_argument("n_instances must be >= 1");
    if (weights.order != lag) throw std::invalid_argument("weights.order does not match lag");

    std::vector<std::vector<double>> per_instance(static_cast<std::size_t>(n_instances));
    parallel_for(static_cast<std::size_t>(n_instances), options.n_threads, [&](std::size_t i) {
        const std::uint64_t instance_seed = derive_seed(rng_seed, i);
        Rng rng(instance_seed);
        std::vector<Filter> filters;
        filters.reserve(static_cast<std::size_t>(n_filters));
        for (int f = 0; f < n_filters; ++f)
            filters.push_back(sample_uniform_stable_filter(lag, weights, rng));
        const DistanceTable table = pairwise_distances(filters, 1.0);
        per_instance[i] = instance_curve(table, m_max, n_filters, derive_seed(instance_seed, 1u << 20),
                                         options.clustering_restarts);
    });

    ReferenceCurve curve;
    curve.lag = lag;
    curve.m_max = m_max;
    curve.n_filters = n_filters;
    curve.n_instances = n_instances;
    curve.seed = rng_seed;
    curve.values.assign(static_cast<std::size_t>(m_max), 0.0);
    for (const auto& inst : per_instance)
        for (int m = 0; m < m_max; ++m) curve.values[static_cast<std::size_t>(m)] += inst[static_cast<std::size_t>(m)];
    for (double& v : curve.values) v /= n_instances;
    return curve;
}

EmpiricalCurve empirical_curve(const TimeSeries& series, int m_max, const EmConfig& config,
                               std::uint64_t rng_seed) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    EmpiricalCurve curve;
    curve.log_mspe.reserve(static_cast<std::size_t>(m_max));
    curve.mspe.reserve(static_cast<std::size_t>(m_max));
    curve.mspe_min.reserve(static_cast<std::size_t>(m_max));
    curve.fits.reserve(static_cast<std::size_t>(m_max));
    for (int m = 1; m <= m_max; ++m) {
        FitResult fit = fit_em(series, m, config.max_iter, config.tol, config.n_restarts,
                               derive_seed(rng_seed, static_cast<std::uint64_t>(m)));
        const double mspe = classification_mspe(fit.model, series);
        curve.mspe.push_back(mspe);
        curve.mspe_min.push_back(empirical_mspe(fit.model, series));
        curve.log_mspe.push_back(std::log(std::max(mspe, kMspeFloor)));
        curve.fits.push_back(std::move(fit));
    }
    return curve;
}

GapResult select_m_gap(const ReferenceCurve& reference, const std::vector<double>& empirical) {
    if (reference.values.size() != empirical.size())
        throw LengthMismatch("reference and empirical curves differ in length");
    GapResult result;
    result.reference = reference;
    result.empirical = empirical;
    result.gaps.resize(empirical.size());
    int best = 0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        result.gaps[i] = reference.values[i] - empirical[i];
        if (result.gaps[i] > result.gaps[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    result.selected_m = best + 1;
    return result;
}

namespace {
template <typename Criterion>
int argmin_criterion(const std::vector<FitResult>& fits, int n_obs, Criterion crit) {
    if (fits.empty()) throw std::invalid_argument("no fits supplied");
    int best = 0;
    double best_value = crit(fits[0], n_obs);
    for (std::size_t i = 1; i < fits.size(); ++i) {
        const double v = crit(fits[i], n_obs);
        if (v < best_value) {
            best_value = v;
            best = static_cast<int>(i);
        }
    }
    return best + 1;
}
}  // namespace

int select_m_aic(const std::vector<FitResult>& fits, int n_obs) {
    return argmin_criterion(fits, n_obs, [](const FitResult& f, int n) { return aic(f, n); });
}

int select_m_bic(const std::vector<FitResult>& fits, int n_obs) {
    return argmin_criterion(fits, n_obs, [](const FitResult& f, int n) { return bic(f, n); });
}

GapAnalysis gap_analysis(const TimeSeries& series, const ReferenceCurve& reference, int m_max,
                         const EmConfig& config, std::uint64_t rng_seed) {
    if (m_max < 1 || m_max > reference.m_max)
        throw LengthMismatch("m_max exceeds the reference curve's range");
    if (reference.lag != series.lag()) throw LengthMismatch("reference curve lag does not match series");

    GapAnalysis analysis;
    analysis.curve = empirical_curve(series, m_max, config, rng_seed);
    analysis.result = select_m_gap(reference.truncated(m_max), analysis.curve.log_mspe);
    analysis.result.aic_m = select_m_aic(analysis.curve.fits, series.n_obs());
    analysis.result.bic_m = select_m_bic(analysis.curve.fits, series.n_obs());
    return analysis;
}

}  // namespace argap
