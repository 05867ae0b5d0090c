#include "argap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "argap/errors.hpp"
#include "argap/parallel.hpp"
#include "argap/rng.hpp"
#include "argap/sampler.hpp"

namespace argap {

namespace {

constexpr int kBurnInSteps = 100;
constexpr double kAmplitudeBound = 1e6;
constexpr int kReplicationRedrawCap = 100;

int mode_at(const ScenarioTruth& truth, int n, Rng& rng) {
    const auto& sw = truth.switching;
    if (sw.kind == SwitchingSpec::Kind::iid_multinomial) {
        const double u = rng.uniform01();
        double cum = 0.0;
        for (std::size_t m = 0; m + 1 < sw.mode_probabilities.size(); ++m) {
            cum += sw.mode_probabilities[m];
            if (u < cum) return static_cast<int>(m);
        }
        return static_cast<int>(sw.mode_probabilities.size()) - 1;
    }
    const int seg_len = std::max(1, truth.n / sw.n_segments);
    const int segment = std::min((n - 1) / seg_len, sw.n_segments - 1);
    return segment % truth.true_m;
}

// state holds the latest `lag` values, newest last.
double step(const Filter& mode, const std::vector<double>& state, double noise) {
    const auto& psi = mode.coefficients();
    const std::size_t lag = psi.size();
    double x = noise;
    for (std::size_t l = 1; l <= lag; ++l) x += psi[l - 1] * state[state.size() - l];
    return x;
}

TimeSeries generate_impl(const ScenarioTruth& truth, std::vector<double> state, Rng& rng) {
    const double sigma = std::sqrt(truth.sigma2);
    std::vector<double> values = state;  // chronological; first lag entries = presample
    values.reserve(static_cast<std::size_t>(truth.lag + truth.n));
    for (int n = 1; n <= truth.n; ++n) {
        const int m = mode_at(truth, n, rng);
        const double x = step(truth.filters[static_cast<std::size_t>(m)], state, sigma * rng.normal());
        values.push_back(x);
        state.erase(state.begin());
        state.push_back(x);
    }
    return TimeSeries::from_chronological(std::move(values), truth.lag);
}

}  // namespace

void ScenarioTruth::validate() const {
    if (true_m < 1 || static_cast<int>(filters.size()) != true_m)
        throw std::invalid_argument("filter count must equal true_m >= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be nonnegative");
    for (const auto& f : filters) {
        if (f.length() != lag) throw LengthMismatch("scenario filters must have the scenario lag");
        if (!is_stable(f.coefficients())) throw NotStable("scenario filters must be stable");
    }
    if (switching.kind == SwitchingSpec::Kind::iid_multinomial) {
        if (static_cast<int>(switching.mode_probabilities.size()) != true_m)
            throw std::invalid_argument("need one probability per mode");
        double sum = 0.0;
        for (double p : switching.mode_probabilities) {
            if (p < 0.0) throw std::invalid_argument("probabilities must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
    } else if (switching.n_segments < 1) {
        throw std::invalid_argument("segmented switching needs n_segments >= 1");
    }
}

TimeSeries generate_tvar(const ScenarioTruth& truth, std::uint64_t rng_seed) {
    truth.validate();
    Rng rng(rng_seed);
    std::vector<double> state(static_cast<std::size_t>(truth.lag));
    for (double& v : state) v = rng.normal();
    const double sigma = std::sqrt(truth.sigma2);
    for (int i = 0; i < kBurnInSteps; ++i) {
        const double x = step(truth.filters.front(), state, sigma * rng.normal());
        state.erase(state.begin());
        state.push_back(x);
    }
    return generate_impl(truth, std::move(state), rng);
}

TimeSeries generate_tvar(const ScenarioTruth& truth, const std::vector<double>& presample,
                         std::uint64_t rng_seed) {
    truth.validate();
    if (static_cast<int>(presample.size()) != truth.lag)
        throw std::invalid_argument("presample must hold exactly lag values");
    Rng rng(rng_seed);
    return generate_impl(truth, presample, rng);
}

ScenarioTruth make_scenario(int scenario_id, std::uint64_t rng_seed) {
    ScenarioTruth truth;
    truth.n = 1400;
    truth.sigma2 = 1.0;
    switch (scenario_id) {
        case 1:
            truth.true_m = 4;
            truth.lag = 2;
            truth.switching = {SwitchingSpec::Kind::iid_multinomial, {0.25, 0.25, 0.25, 0.25}, 0};
            break;
        case 2:
            truth.true_m = 2;
            truth.lag = 4;
            truth.switching = {SwitchingSpec::Kind::iid_multinomial, {0.4, 0.6}, 0};
            break;
        case 3:
            truth.true_m = 7;
            truth.lag = 1;
            truth.switching = {SwitchingSpec::Kind::segmented, {}, 7};
            break;
        default:
            throw std::invalid_argument("scenario_id must be 1, 2 or 3");
    }
    const ConfigurationWeights weights = cached_volumes(truth.lag);
    Rng rng(rng_seed);
    truth.filters.reserve(static_cast<std::size_t>(truth.true_m));
    for (int m = 0; m < truth.true_m; ++m)
        truth.filters.push_back(sample_uniform_stable_filter(truth.lag, weights, rng));
    return truth;
}

ScenarioReplication draw_scenario_replication(int scenario_id, std::uint64_t rng_seed) {
    // Per-mode stability does not bound an iid-switched process, so a
    // fraction of raw draws produces series that blow past any fixed
    // amplitude.  Those replications are redrawn wholesale (fresh filters
    // and fresh noise) until the realized series stays within bounds.
    for (int attempt = 0; attempt < kReplicationRedrawCap; ++attempt) {
        ScenarioTruth truth =
            make_scenario(scenario_id, derive_seed(rng_seed, static_cast<std::uint64_t>(2 * attempt)));
        TimeSeries series =
            generate_tvar(truth, derive_seed(rng_seed, static_cast<std::uint64_t>(2 * attempt + 1)));
        double peak = 0.0;
        for (double v : series.data()) peak = std::max(peak, std::abs(v));
        if (peak < kAmplitudeBound) return {std::move(truth), std::move(series)};
    }
    throw RejectionBudgetExceeded("no bounded scenario realization within 100 redraws");
}

ExperimentTable run_experiment(int scenario_id, int n_replications, int em_restarts, int m_max,
                               std::uint64_t rng_seed, const ReferenceCurve& reference,
                               const ExperimentOptions& options) {
    if (n_replications < 1) throw std::invalid_argument("n_replications must be >= 1");
    const ScenarioTruth probe = make_scenario(scenario_id, rng_seed);
    if (reference.lag != probe.lag)
        throw LengthMismatch("reference curve lag does not match the scenario");
    if (m_max < probe.true_m) throw std::invalid_argument("m_max must cover the true mode count");
    if (m_max > reference.m_max) throw LengthMismatch("reference curve too short for m_max");

    EmConfig em = options.em;
    em.n_restarts = em_restarts;

    std::vector<std::array<int, 3>> selections(static_cast<std::size_t>(n_replications));
    parallel_for(static_cast<std::size_t>(n_replications), options.n_threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(rng_seed, r);
        const ScenarioReplication rep = draw_scenario_replication(scenario_id, derive_seed(rep_seed, 1));
        const GapAnalysis analysis =
            gap_analysis(rep.series, reference, m_max, em, derive_seed(rep_seed, 3));
        selections[r] = {analysis.result.selected_m, analysis.result.aic_m, analysis.result.bic_m};
    });

    ExperimentTable table;
    table.scenario = scenario_id;
    table.true_m = probe.true_m;
    table.m_max = m_max;
    table.n_replications = n_replications;
    for (auto& c : table.counts) c.assign(static_cast<std::size_t>(m_max), 0);
    for (const auto& sel : selections)
        for (int k = 0; k < 3; ++k) ++table.counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(sel[static_cast<std::size_t>(k)] - 1)];
    for (int k = 0; k < 3; ++k) {
        const auto& counts = table.counts[static_cast<std::size_t>(k)];
        table.accuracy[static_cast<std::size_t>(k)] =
            static_cast<double>(counts[static_cast<std::size_t>(probe.true_m - 1)]) / n_replications;
        int modal = 0;
        for (std::size_t m = 1; m < counts.size(); ++m)
            if (counts[m] > counts[static_cast<std::size_t>(modal)]) modal = static_cast<int>(m);
        table.modal_m[static_cast<std::size_t>(k)] = modal + 1;
    }
    return table;
}

}  // namespace argap
