#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "argap/gap.hpp"
#include "argap/mixture.hpp"

namespace argap {

// How the active mode is chosen at each time step.
struct SwitchingSpec {
    enum class Kind { iid_multinomial, segmented };
    Kind kind = Kind::iid_multinomial;
    std::vector<double> mode_probabilities;  // iid_multinomial
    int n_segments = 0;                      // segmented; remainder joins the last segment
};

// Ground truth of one synthetic multi-mode AR series.
struct ScenarioTruth {
    int true_m = 0;
    int lag = 0;
    std::vector<Filter> filters;
    SwitchingSpec switching;
    double sigma2 = 1.0;
    int n = 0;

    void validate() const;
};

// Switching AR recursion x_n = phi_n' x_n + e_n.  The presample is drawn as
// lag standard normals and a 100-step burn-in under the first mode washes
// out the transient before recording.
TimeSeries generate_tvar(const ScenarioTruth& truth, std::uint64_t rng_seed);

// Same recursion from an explicit chronological presample (x_{1-L}..x_0),
// recording immediately with no burn-in.
TimeSeries generate_tvar(const ScenarioTruth& truth, const std::vector<double>& presample,
                         std::uint64_t rng_seed);

// The three benchmark scenarios, N = 1400, sigma2 = 1, filters freshly drawn
// from the uniform stable sampler:
//   1: four lag-2 modes, iid switching (.25, .25, .25, .25)
//   2: two lag-4 modes, iid switching (.4, .6)
//   3: seven lag-1 modes over seven equal segments
ScenarioTruth make_scenario(int scenario_id, std::uint64_t rng_seed);

// One experiment replication: a scenario truth together with a realized
// series whose amplitude stayed under 1e6.  Switching between individually
// stable modes can still be explosive, so unbounded realizations are
// redrawn (fresh filters and noise) rather than handed to the fitters.
struct ScenarioReplication {
    ScenarioTruth truth;
    TimeSeries series;
};

ScenarioReplication draw_scenario_replication(int scenario_id, std::uint64_t rng_seed);

// Selection-accuracy table over replications of one scenario.
struct ExperimentTable {
    static constexpr std::array<const char*, 3> kMethods{"gap", "aic", "bic"};

    int scenario = 0;
    int true_m = 0;
    int m_max = 0;
    int n_replications = 0;
    std::array<std::vector<int>, 3> counts;  // per method, counts[M-1] over M = 1..m_max
    std::array<double, 3> accuracy{};        // fraction of replications hitting true_m
    std::array<int, 3> modal_m{};            // most frequent selection (ties to smallest M)
};

struct ExperimentOptions {
    EmConfig em;
    int n_threads = 1;
};

// Per replication: fresh scenario truth, fresh series, empirical curve and
// gap/AIC/BIC selection against the supplied reference curve.
ExperimentTable run_experiment(int scenario_id, int n_replications, int em_restarts, int m_max,
                               std::uint64_t rng_seed, const ReferenceCurve& reference,
                               const ExperimentOptions& options = {});

}  // namespace argap
