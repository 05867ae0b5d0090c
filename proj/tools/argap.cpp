// argap: estimate the number of autoregressive modes in a time series.
//
// Subcommands: sample, refcurve, fit, select, experiment.  Every stochastic
// command takes an explicit --seed and writes byte-identical output when
// rerun with the same flags.  Exit codes: 0 success, 1 internal numerical
// failure, 2 user-input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "argap/errors.hpp"
#include "argap/gap.hpp"
#include "argap/io.hpp"
#include "argap/mixture.hpp"
#include "argap/parallel.hpp"
#include "argap/rng.hpp"
#include "argap/sampler.hpp"
#include "argap/simulate.hpp"

namespace {

using namespace argap;

struct SeriesInput {
    TimeSeries series;
    std::string presample_source;
};

SeriesInput load_series(const std::string& input, int lag, const std::string& presample_path) {
    std::vector<double> values = read_series_csv(input);
    if (!presample_path.empty()) {
        std::vector<double> pre = read_series_csv(presample_path);
        if (static_cast<int>(pre.size()) != lag)
            throw ParseError(presample_path + ": presample must hold exactly " + std::to_string(lag) +
                             " values");
        pre.insert(pre.end(), values.begin(), values.end());
        return {TimeSeries::from_chronological(std::move(pre), lag), "file:" + presample_path};
    }
    if (static_cast<int>(values.size()) < lag + 1)
        throw std::invalid_argument("series too short: need more than lag observations when the "
                                    "first lag values serve as the presample");
    return {TimeSeries::from_chronological(std::move(values), lag), "first_L_observations"};
}

ReferenceCurve load_refcurve(const std::string& path, int expected_lag, int required_m_max) {
    ReferenceCurve curve = read_refcurve(path);
    if (curve.lag == 0) curve.lag = expected_lag;  // CSV without metadata: trust the flags
    if (curve.lag != expected_lag)
        throw ParseError(path + ": reference curve lag " + std::to_string(curve.lag) +
                         " does not match --lag " + std::to_string(expected_lag));
    if (curve.m_max < required_m_max)
        throw ParseError(path + ": reference curve covers M <= " + std::to_string(curve.m_max) +
                         ", need " + std::to_string(required_m_max));
    return curve;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

struct SampleArgs {
    int lag = 2;
    int count = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_sample(const SampleArgs& a) {
    const ConfigurationWeights weights = cached_volumes(a.lag);
    std::vector<Filter> filters;
    filters.reserve(static_cast<std::size_t>(a.count));
    for (int k = 0; k < a.count; ++k)
        filters.push_back(
            sample_uniform_stable_filter(a.lag, weights, derive_seed(a.seed, static_cast<std::uint64_t>(k))));
    write_filters_csv(a.out, filters, a.lag);
}

struct RefcurveArgs {
    int lag = 1;
    int m_max = 6;
    int n_filters = 1000;
    int n_instances = 20;
    int restarts = 20;
    int threads = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

void run_refcurve(const RefcurveArgs& a) {
    const ConfigurationWeights weights = cached_volumes(a.lag);
    ReferenceCurveOptions options;
    options.clustering_restarts = a.restarts;
    options.n_threads = resolve_threads(a.threads);
    const ReferenceCurve curve =
        reference_curve(a.lag, a.m_max, a.n_filters, a.n_instances, a.seed, weights, options);
    write_refcurve(a.out, curve, a.format == "json");
}

struct FitArgs {
    std::string input;
    std::string presample;
    int lag = 1;
    int modes = 1;
    int em_restarts = 10;
    int max_iter = 500;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::string out;
};

void run_fit(const FitArgs& a) {
    const SeriesInput in = load_series(a.input, a.lag, a.presample);
    const FitResult fit = fit_em(in.series, a.modes, a.max_iter, a.tol, a.em_restarts, a.seed);
    nlohmann::json j = model_to_json(fit.model);
    j["log_likelihood"] = fit.log_likelihood;
    j["aic"] = aic(fit, in.series.n_obs());
    j["bic"] = bic(fit, in.series.n_obs());
    j["mspe"] = empirical_mspe(fit.model, in.series);
    j["converged"] = fit.converged;
    j["n_iterations"] = fit.n_iterations;
    j["n_obs"] = in.series.n_obs();
    j["presample"] = in.presample_source;
    write_json_file(a.out, j);
}

struct SelectArgs {
    std::string input;
    std::string presample;
    std::string refcurve;
    int lag = 1;
    int m_max = 6;
    int em_restarts = 10;
    int max_iter = 500;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

void run_select(const SelectArgs& a) {
    const SeriesInput in = load_series(a.input, a.lag, a.presample);
    const ReferenceCurve curve = load_refcurve(a.refcurve, a.lag, a.m_max);
    EmConfig em{a.max_iter, a.tol, a.em_restarts};
    const GapAnalysis analysis = gap_analysis(in.series, curve, a.m_max, em, a.seed);
    if (a.format == "json")
        write_json_file(a.out, gap_analysis_json(analysis, in.series.n_obs(), in.presample_source));
    else
        write_gap_csv(a.out, analysis);
}

struct ExperimentArgs {
    int scenario = 1;
    int replications = 20;
    int em_restarts = 10;
    int m_max = 0;  // 0: scenario default (6, 6, 8)
    int max_iter = 500;
    double tol = 1e-6;
    int threads = 0;
    std::uint64_t seed = 0;
    std::string refcurve;
    std::string out;
    std::string format = "csv";
};

void run_experiment_cmd(const ExperimentArgs& a) {
    const int m_max = a.m_max > 0 ? a.m_max : (a.scenario == 3 ? 8 : 6);
    const ScenarioTruth probe = make_scenario(a.scenario, a.seed);
    const ReferenceCurve curve = load_refcurve(a.refcurve, probe.lag, m_max);
    ExperimentOptions options;
    options.em = EmConfig{a.max_iter, a.tol, a.em_restarts};
    options.n_threads = resolve_threads(a.threads);
    const ExperimentTable table =
        run_experiment(a.scenario, a.replications, a.em_restarts, m_max, a.seed, curve, options);
    if (a.format == "json")
        write_json_file(a.out, experiment_to_json(table));
    else
        write_experiment_csv(a.out, table);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AR mode-count selection via gap statistics on stable-filter clustering"};
    app.require_subcommand(1);

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw uniform random stable AR filters");
    sample_cmd->add_option("--lag", sample.lag, "Filter length L")->required()->check(CLI::Range(1, 8));
    sample_cmd->add_option("--count", sample.count, "Number of filters")->required()
        ->check(CLI::NonNegativeNumber);
    sample_cmd->add_option("--seed", sample.seed, "RNG seed")->required();
    sample_cmd->add_option("--out,-o", sample.out, "Output CSV path")->required();

    RefcurveArgs refcurve;
    auto* refcurve_cmd = app.add_subcommand("refcurve", "Build the clustering reference curve");
    refcurve_cmd->add_option("--lag", refcurve.lag, "Filter length L")->required()->check(CLI::Range(1, 8));
    refcurve_cmd->add_option("--mmax", refcurve.m_max, "Largest candidate M")
        ->capture_default_str()->check(CLI::PositiveNumber);
    refcurve_cmd->add_option("--filters", refcurve.n_filters, "Filters per instance (F)")
        ->capture_default_str();
    refcurve_cmd->add_option("--instances", refcurve.n_instances, "Random instances averaged")
        ->capture_default_str();
    refcurve_cmd->add_option("--restarts", refcurve.restarts, "k-medoids restarts")
        ->capture_default_str();
    refcurve_cmd->add_option("--threads", refcurve.threads, "Worker threads (0 = auto)")
        ->capture_default_str();
    refcurve_cmd->add_option("--seed", refcurve.seed, "RNG seed")->required();
    refcurve_cmd->add_option("--out,-o", refcurve.out, "Output path")->required();
    refcurve_cmd->add_option("--format", refcurve.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit an M-mode AR mixture by EM");
    fit_cmd->add_option("--input,-i", fit.input, "Series CSV (header x)")->required();
    fit_cmd->add_option("--lag", fit.lag, "AR lag order L")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--modes", fit.modes, "Number of modes M")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--presample", fit.presample,
                        "Presample CSV (L values, oldest first); default: consume first L observations");
    fit_cmd->add_option("--em-restarts", fit.em_restarts, "EM restarts")->capture_default_str();
    fit_cmd->add_option("--max-iter", fit.max_iter, "EM iteration cap")->capture_default_str();
    fit_cmd->add_option("--tol", fit.tol, "EM log-likelihood tolerance")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "RNG seed")->required();
    fit_cmd->add_option("--out,-o", fit.out, "Output model JSON path")->required();

    SelectArgs select;
    auto* select_cmd = app.add_subcommand("select", "Select the mode count by the gap statistic");
    select_cmd->add_option("--input,-i", select.input, "Series CSV (header x)")->required();
    select_cmd->add_option("--lag", select.lag, "AR lag order L")->required()->check(CLI::PositiveNumber);
    select_cmd->add_option("--mmax", select.m_max, "Largest candidate M")->required()
        ->check(CLI::PositiveNumber);
    select_cmd->add_option("--refcurve", select.refcurve, "Reference curve file (csv or json)")
        ->required();
    select_cmd->add_option("--presample", select.presample,
                           "Presample CSV (L values, oldest first); default: consume first L observations");
    select_cmd->add_option("--em-restarts", select.em_restarts, "EM restarts")->capture_default_str();
    select_cmd->add_option("--max-iter", select.max_iter, "EM iteration cap")->capture_default_str();
    select_cmd->add_option("--tol", select.tol, "EM log-likelihood tolerance")->capture_default_str();
    select_cmd->add_option("--seed", select.seed, "RNG seed")->required();
    select_cmd->add_option("--out,-o", select.out, "Output path")->required();
    select_cmd->add_option("--format", select.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    ExperimentArgs experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "Replicate a benchmark scenario");
    experiment_cmd->add_option("--scenario", experiment.scenario, "Scenario id")->required()
        ->check(CLI::Range(1, 3));
    experiment_cmd->add_option("--replications", experiment.replications, "Replications")
        ->capture_default_str()->check(CLI::PositiveNumber);
    experiment_cmd->add_option("--em-restarts", experiment.em_restarts, "EM restarts per fit")
        ->capture_default_str();
    experiment_cmd->add_option("--mmax", experiment.m_max, "Largest candidate M (0 = scenario default)")
        ->capture_default_str();
    experiment_cmd->add_option("--threads", experiment.threads, "Worker threads (0 = auto)")
        ->capture_default_str();
    experiment_cmd->add_option("--refcurve", experiment.refcurve, "Reference curve file")->required();
    experiment_cmd->add_option("--seed", experiment.seed, "RNG seed")->required();
    experiment_cmd->add_option("--out,-o", experiment.out, "Output path")->required();
    experiment_cmd->add_option("--format", experiment.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "argap: " << e.what() << '\n';
        return 2;
    }

    try {
        if (sample_cmd->parsed()) run_sample(sample);
        if (refcurve_cmd->parsed()) run_refcurve(refcurve);
        if (fit_cmd->parsed()) run_fit(fit);
        if (select_cmd->parsed()) run_select(select);
        if (experiment_cmd->parsed()) run_experiment_cmd(experiment);
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "argap: " << e.what() << '\n';
        return 2;
    } catch (const RejectionBudgetExceeded& e) {
        std::cerr << "argap: " << e.what() << " (lag too large for this sampler)\n";
        return 2;
    } catch (const InvalidM& e) {
        std::cerr << "argap: " << e.what() << '\n';
        return 2;
    } catch (const LengthMismatch& e) {
        std::cerr << "argap: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argap: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "argap: numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "argap: " << e.what() << '\n';
        return 1;
    }
}
