// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line each.  Exits nonzero if any criterion fails.
//
// Build passes ARGAP_CLI_PATH so criterion 9 can exercise the installed
// command-line surface byte-for-byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "argap/clustering.hpp"
#include "argap/distance.hpp"
#include "argap/errors.hpp"
#include "argap/filter.hpp"
#include "argap/gap.hpp"
#include "argap/io.hpp"
#include "argap/mixture.hpp"
#include "argap/rng.hpp"
#include "argap/sampler.hpp"
#include "argap/simulate.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace argap;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %d: %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, pass, detail, seconds);
}

RootSet stable_root_set_with_margin(Rng& rng, int order) {
    for (;;) {
        RootSet roots = random_root_set(rng, order, 0.9, 5e-2);
        bool ok = true;
        for (const auto& z : roots.expanded())
            if (std::abs(z) < 2e-2) ok = false;  // keep the residue path non-degenerate
        if (ok) return roots;
    }
}

double yule_walker_distance(const Filter& a, const Filter& b) {
    const Eigen::MatrixXd cov = autocovariance_form(a, 1.0);
    Eigen::VectorXd delta(a.length());
    for (int l = 1; l <= a.length(); ++l) delta(l - 1) = a.psi(l) - b.psi(l);
    return delta.dot(cov * delta);
}

// --- criterion 1: residue vs quadrature vs Yule-Walker on random pairs ----

bool criterion_distance_routes(std::string& detail) {
    Rng rng(0xD157);
    double worst_quad = 0.0, worst_yw = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int order = 1 + trial % 6;
        const Filter a = roots_to_coefficients(stable_root_set_with_margin(rng, order));
        const Filter b = roots_to_coefficients(stable_root_set_with_margin(rng, order));
        const double residue = filter_distance(a, b, 1.0);
        const double quad = filter_distance_quadrature(a, b, 1.0, 8192);
        const double yw = yule_walker_distance(a, b);
        worst_quad = std::max(worst_quad, std::abs(residue - quad) / std::max(residue, 1e-12));
        worst_yw = std::max(worst_yw, std::abs(residue - yw) / std::max(residue, 1e-12));
    }
    std::ostringstream os;
    os << "worst rel err: quadrature " << worst_quad << ", yule-walker " << worst_yw;
    detail = os.str();
    return worst_quad < 1e-5 && worst_yw < 1e-6;
}

// --- criterion 2: first-order closed form ---------------------------------

bool criterion_ar1_closed_form(std::string& detail) {
    double worst = 0.0;
    for (int ia = -9; ia <= 9; ++ia) {
        for (int ib = -9; ib <= 9; ++ib) {
            const double a = ia / 10.0, b = ib / 10.0;
            for (double sigma2 : {1.0, 3.0}) {
                const double expected = (a - b) * (a - b) * sigma2 / (1.0 - a * a);
                const double got = filter_distance(Filter({a}), Filter({b}), sigma2);
                worst = std::max(worst, std::abs(got - expected));
            }
        }
    }
    std::ostringstream os;
    os << "worst abs err " << worst << " over 19x19 grid";
    detail = os.str();
    return worst <= 1e-10;
}

// --- criterion 3: Jacobian identity of the coefficient map ------------------

bool criterion_jacobian(std::string& detail) {
    Rng rng(0x7AC0B);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int order = 1 + trial % 5;
        const RootSet roots = random_root_set(rng, order, 0.85);
        const double fd = fd_jacobian_abs_det(roots);
        const double expected = std::pow(2.0, static_cast<double>(roots.complex_pairs().size())) *
                                std::abs(vandermonde(roots));
        worst = std::max(worst, std::abs(fd - expected) / expected);
    }
    std::ostringstream os;
    os << "worst rel err " << worst << " over 100 root sets";
    detail = os.str();
    return worst < 1e-4;
}

// --- criterion 4: sampler uniformity ---------------------------------------

bool criterion_sampler_uniformity(std::string& detail) {
    std::ostringstream os;
    bool pass = true;
    const int n = 10'000;
    for (int order = 1; order <= 3; ++order) {
        const auto weights = cached_volumes(order);
        Rng rng_root(0x5A01 + order);
        Rng rng_box(0x5B02 + order);
        std::vector<std::vector<double>> root_coords(order), box_coords(order);
        for (int i = 0; i < n; ++i) {
            const Filter a = sample_uniform_stable_filter(order, weights, rng_root);
            const Filter b = sample_coefficient_rejection(order, rng_box);
            for (int l = 1; l <= order; ++l) {
                root_coords[static_cast<std::size_t>(l - 1)].push_back(a.psi(l));
                box_coords[static_cast<std::size_t>(l - 1)].push_back(b.psi(l));
            }
        }
        for (int l = 0; l < order; ++l) {
            const double ks = ks_two_sample_statistic(root_coords[static_cast<std::size_t>(l)],
                                                      box_coords[static_cast<std::size_t>(l)]);
            const bool ok = ks < ks_two_sample_critical(n, n);
            if (!ok) pass = false;
            os << "L" << order << " ks" << (l + 1) << "=" << ks << (ok ? " " : "! ");
        }
        // coarse spatial two-sample chi-square
        auto binom = [](int nn, int kk) {
            double b = 1.0;
            for (int i = 1; i <= kk; ++i) b = b * (nn - kk + i) / i;
            return b;
        };
        const int grid = order == 1 ? 16 : (order == 2 ? 6 : 4);
        const int cells = static_cast<int>(std::pow(grid, order));
        std::vector<int> ca(static_cast<std::size_t>(cells), 0), cb(static_cast<std::size_t>(cells), 0);
        for (int i = 0; i < n; ++i) {
            int idx_a = 0, idx_b = 0;
            for (int l = 0; l < order; ++l) {
                const double bound = binom(order, l + 1);
                auto cell = [&](double v) {
                    return std::clamp(static_cast<int>((v + bound) / (2.0 * bound) * grid), 0, grid - 1);
                };
                idx_a = idx_a * grid + cell(root_coords[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
                idx_b = idx_b * grid + cell(box_coords[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
            }
            ca[static_cast<std::size_t>(idx_a)] += 1;
            cb[static_cast<std::size_t>(idx_b)] += 1;
        }
        const auto chi2 = chi2_two_sample(ca, cb);
        if (!chi2.pass) pass = false;
        os << "chi2(df" << chi2.df << ")=" << std::lround(chi2.statistic) << (chi2.pass ? "; " : "!; ");

        if (order == 2) {
            int complex_count = 0;
            for (int i = 0; i < n; ++i) {
                const double p1 = root_coords[0][static_cast<std::size_t>(i)];
                const double p2 = root_coords[1][static_cast<std::size_t>(i)];
                if (p1 * p1 + 4.0 * p2 < 0.0) ++complex_count;
            }
            const double frac = static_cast<double>(complex_count) / n;
            const double frac_se = std::sqrt((2.0 / 3) * (1.0 / 3) / n);
            const bool frac_ok = std::abs(frac - 2.0 / 3) <= 3.0 * frac_se;
            const double total = weights.total_volume();
            double total_se = 0.0;
            for (double se : weights.standard_errors) total_se = std::hypot(total_se, se);
            const bool vol_ok = std::abs(total - 4.0) <= 3.0 * total_se;
            if (!frac_ok || !vol_ok) pass = false;
            os << "complex_frac=" << frac << (frac_ok ? " " : "! ") << "vol=" << total
               << (vol_ok ? "; " : "!; ");
        }
    }
    detail = os.str();
    return pass;
}

// --- criterion 5: EM properties --------------------------------------------

bool criterion_em(std::string& detail) {
    std::ostringstream os;
    bool pass = true;

    // (a) monotone likelihood on 50 random instances
    Rng rng(0xE3);
    int monotone_violations = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const int lag = 1 + static_cast<int>(rng.uniform_index(3));
        const int modes = 1 + static_cast<int>(rng.uniform_index(3));
        ScenarioTruth truth;
        truth.true_m = modes;
        truth.lag = lag;
        for (int m = 0; m < modes; ++m) truth.filters.push_back(random_stable_filter(rng, lag));
        truth.switching = {SwitchingSpec::Kind::iid_multinomial,
                           std::vector<double>(static_cast<std::size_t>(modes), 1.0 / modes), 0};
        truth.sigma2 = rng.uniform(0.2, 1.5);
        truth.n = 200;
        const TimeSeries series = generate_tvar(truth, derive_seed(0xE4, static_cast<std::uint64_t>(inst)));
        const FitResult fit = fit_em(series, 1 + static_cast<int>(rng.uniform_index(3)), 120, 1e-9, 1,
                                     derive_seed(0xE5, static_cast<std::uint64_t>(inst)));
        for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
            if (fit.loglik_trace[i] < fit.loglik_trace[i - 1] - 1e-8) ++monotone_violations;
    }
    if (monotone_violations > 0) pass = false;
    os << "monotone violations " << monotone_violations << "/50 instances; ";

    // (b) single-mode fit equals least squares
    double worst_ls = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        ScenarioTruth truth;
        truth.true_m = 1;
        truth.lag = 2;
        truth.filters = {random_stable_filter(rng, 2)};
        truth.switching = {SwitchingSpec::Kind::iid_multinomial, {1.0}, 0};
        truth.sigma2 = 0.8;
        truth.n = 300;
        const TimeSeries series = generate_tvar(truth, derive_seed(0xE6, static_cast<std::uint64_t>(inst)));
        const FitResult fit = fit_em(series, 1, 100, 1e-10, 1, 1);
        const auto ols = ols_ar_fit(series);
        for (int l = 1; l <= 2; ++l)
            worst_ls = std::max(worst_ls, std::abs(fit.model.modes[0].psi(l) - ols[static_cast<std::size_t>(l - 1)]));
    }
    if (worst_ls >= 1e-9) pass = false;
    os << "M=1 vs OLS worst " << worst_ls << "; ";

    // (c) well-separated two-mode recovery
    ScenarioTruth truth;
    truth.true_m = 2;
    truth.lag = 1;
    truth.filters = {Filter({0.9}), Filter({-0.9})};
    truth.switching = {SwitchingSpec::Kind::iid_multinomial, {0.5, 0.5}, 0};
    truth.sigma2 = 0.01;  // sigma = 0.1
    truth.n = 1000;
    const TimeSeries series = generate_tvar(truth, 0xE7);
    const FitResult fit = fit_em(series, 2, 500, 1e-8, 10, 0xE8);
    double lo = fit.model.modes[0].psi(1), hi = fit.model.modes[1].psi(1);
    if (lo > hi) std::swap(lo, hi);
    const double recovery = std::max(std::abs(lo + 0.9), std::abs(hi - 0.9));
    if (recovery >= 0.05) pass = false;
    os << "2-mode recovery err " << recovery;
    detail = os.str();
    return pass;
}

// --- criterion 6: reference-curve shape ------------------------------------

bool criterion_reference_curves(std::string& detail) {
    std::ostringstream os;
    bool pass = true;
    for (int lag = 1; lag <= 4; ++lag) {
        const auto weights = cached_volumes(lag);
        const ReferenceCurve curve = reference_curve(lag, 6, 1000, 20, 0xC6 + static_cast<std::uint64_t>(lag),
                                                     weights, {20, 0});
        bool monotone = true, positive = true;
        for (std::size_t i = 0; i < curve.values.size(); ++i) {
            if (i > 0 && curve.values[i] > curve.values[i - 1] + 1e-9) monotone = false;
            if (!(curve.values[i] > 0.0)) positive = false;
        }
        if (!monotone || !positive) pass = false;
        os << "L" << lag << (monotone ? " monotone" : " NOT-monotone")
           << (positive ? " positive" : " NOT-positive") << " [" << curve.values.front() << ".."
           << curve.values.back() << "]; ";
    }
    // W_M at M = F is exactly 1 on a small instance
    const ReferenceCurve tiny = reference_curve(1, 30, 30, 1, 0xC7, cached_volumes(1), {10, 0});
    if (tiny.values.back() != 0.0) pass = false;
    os << "W at M=F: log=" << tiny.values.back();
    detail = os.str();
    return pass;
}

// --- criterion 7: k-medoids exactness at small n ---------------------------

bool criterion_kmedoids_exact(std::string& detail) {
    Rng rng(0xC7A);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int n = 6 + static_cast<int>(rng.uniform_index(5));  // 6..10
        DistanceTable table(n);
        if (inst % 2 == 0) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) table.entry(i, j) = rng.uniform(0.01, 3.0);
        } else {
            std::vector<Filter> filters;
            for (int i = 0; i < n; ++i) filters.push_back(random_stable_filter(rng, 2));
            table = pairwise_distances(filters, 1.0);
        }
        for (int m = 1; m <= 3; ++m) {
            const double exact = exhaustive_k_medoids_wcsd(table, m);
            const auto got = k_medoids(table, m, derive_seed(0xC7B, static_cast<std::uint64_t>(inst * 4 + m)), 50);
            worst = std::max(worst, std::abs(got.wcsd - exact));
        }
    }
    std::ostringstream os;
    os << "worst |wcsd - exhaustive| " << worst;
    detail = os.str();
    return worst <= 1e-12;
}

// --- criterion 8: desk-scale selection-accuracy table ----------------------

bool criterion_experiment_table(std::string& detail) {
    std::ostringstream os;
    bool pass = true;

    ExperimentOptions options;
    options.n_threads = 0;  // all cores
    options.em = EmConfig{500, 1e-6, 10};

    ExperimentTable tables[3];
    for (int scenario = 1; scenario <= 3; ++scenario) {
        const ScenarioTruth probe = make_scenario(scenario, 1);
        const int m_max = scenario == 3 ? 8 : 6;
        const ReferenceCurve reference = reference_curve(
            probe.lag, m_max, 500, 5, 0xAB0 + static_cast<std::uint64_t>(scenario), cached_volumes(probe.lag),
            {20, 0});
        tables[scenario - 1] = run_experiment(scenario, 20, 10, m_max,
                                              0xAC0 + static_cast<std::uint64_t>(scenario), reference, options);
        const auto& t = tables[scenario - 1];
        os << "s" << scenario << " gap_acc=" << t.accuracy[0] << " aic_acc=" << t.accuracy[1]
           << " bic_acc=" << t.accuracy[2] << " modal(g/a/b)=" << t.modal_m[0] << "/" << t.modal_m[1]
           << "/" << t.modal_m[2] << "; ";
    }

    // (a) + (b): scenario 3 ordering and degeneracy of the penalty criteria
    const auto& s3 = tables[2];
    if (!(s3.accuracy[0] >= s3.accuracy[1] && s3.accuracy[0] >= s3.accuracy[2])) pass = false;
    if (!(s3.accuracy[0] > 0.0)) pass = false;
    if (!(s3.modal_m[1] < 7 && s3.modal_m[2] < 7)) pass = false;
    // (c): scenarios 1-2 modal gap selection hits the truth
    if (tables[0].modal_m[0] != tables[0].true_m) pass = false;
    if (tables[1].modal_m[0] != tables[1].true_m) pass = false;

    detail = os.str();
    return pass;
}

// --- criterion 9: CLI determinism ------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ARGAP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing:" + path.string() + ">";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_cli_determinism(std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "argap_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    setenv("ARGAP_CACHE_DIR", (dir / "cache").string().c_str(), 1);

    // seed data for fit/select
    ScenarioTruth truth;
    truth.true_m = 2;
    truth.lag = 1;
    truth.filters = {Filter({0.9}), Filter({-0.9})};
    truth.switching = {SwitchingSpec::Kind::iid_multinomial, {0.4, 0.6}, 0};
    truth.sigma2 = 1.0;
    truth.n = 500;
    write_series_csv((dir / "series.csv").string(), generate_tvar(truth, 99).data());

    const std::string d = dir.string() + "/";
    const std::vector<std::pair<std::string, std::string>> commands{
        {"sample", "sample --lag 2 --count 50 --seed 7 --out " + d + "OUT"},
        {"refcurve", "refcurve --lag 1 --mmax 7 --filters 60 --instances 2 --seed 7 --out " + d + "OUT"},
        {"fit", "fit --input " + d + "series.csv --lag 1 --modes 2 --em-restarts 4 --seed 7 --out " + d + "OUT"},
        {"select", "select --input " + d + "series.csv --lag 1 --mmax 4 --refcurve " + d +
                       "refcurve.1 --em-restarts 4 --seed 7 --format json --out " + d + "OUT"},
        {"select-csv", "select --input " + d + "series.csv --lag 1 --mmax 4 --refcurve " + d +
                           "refcurve.1 --em-restarts 4 --seed 7 --out " + d + "OUT"},
        {"experiment", "experiment --scenario 3 --replications 2 --em-restarts 2 --mmax 7 --refcurve " +
                           d + "refcurve.1 --seed 7 --out " + d + "OUT"},
    };

    std::ostringstream os;
    bool pass = true;
    for (const auto& [name, tmpl] : commands) {
        std::string first = tmpl, second = tmpl;
        const std::string out1 = d + name + ".1";
        const std::string out2 = d + name + ".2";
        first.replace(first.rfind(d + "OUT"), (d + "OUT").size(), out1);
        second.replace(second.rfind(d + "OUT"), (d + "OUT").size(), out2);
        const int rc1 = run_cli(first);
        const int rc2 = run_cli(second);
        const bool ok = rc1 == 0 && rc2 == 0 && file_bytes(out1) == file_bytes(out2) &&
                        !file_bytes(out1).empty();
        if (!ok) pass = false;
        os << name << (ok ? " ok; " : " MISMATCH; ");
    }
    detail = os.str();
    unsetenv("ARGAP_CACHE_DIR");
    return pass;
}

}  // namespace

int main() {
    std::printf("argap acceptance suite\n");
    run_criterion(1, "distance: residue vs quadrature vs Yule-Walker", criterion_distance_routes);
    run_criterion(2, "distance: first-order closed form", criterion_ar1_closed_form);
    run_criterion(3, "Jacobian of the coefficient map", criterion_jacobian);
    run_criterion(4, "sampler uniformity", criterion_sampler_uniformity);
    run_criterion(5, "EM properties", criterion_em);
    run_criterion(6, "reference-curve shape", criterion_reference_curves);
    run_criterion(7, "k-medoids exactness at small n", criterion_kmedoids_exact);
    run_criterion(8, "desk-scale selection-accuracy table", criterion_experiment_table);
    run_criterion(9, "CLI determinism", criterion_cli_determinism);

    if (g_failures > 0) {
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
