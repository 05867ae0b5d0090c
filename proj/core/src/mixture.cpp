#include "argap/mixture.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "argap/errors.hpp"
#include "argap/rng.hpp"

namespace argap {

namespace {

constexpr double kSigma2Floor = 1e-12;
constexpr double kRidgeScale = 1e-10;
constexpr double kConditionLimit = 1e12;

struct Design {
    Eigen::MatrixXd X;  // N x L, row n-1 = (x_{n-1}, ..., x_{n-L})
    Eigen::VectorXd y;  // N
};

Design build_design(const TimeSeries& series) {
    const int n = series.n_obs();
    const int lag = series.lag();
    Design d{Eigen::MatrixXd(n, lag), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        d.y(i) = series.x(i + 1);
        for (int l = 1; l <= lag; ++l) d.X(i, l - 1) = series.regressor(i + 1, l);
    }
    return d;
}

// N x M matrix of log alpha_m + log Normal(x_n | mode_m' x_n, sigma2).
Eigen::MatrixXd log_component_terms(const MixtureARModel& model, const Design& d) {
    const int n = static_cast<int>(d.y.size());
    const int m = model.n_modes();
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * model.sigma2);
    const double inv_2s2 = 0.5 / model.sigma2;
    Eigen::MatrixXd terms(n, m);
    for (int c = 0; c < m; ++c) {
        const auto& psi = model.modes[static_cast<std::size_t>(c)].coefficients();
        const Eigen::Map<const Eigen::VectorXd> gamma(psi.data(), static_cast<Eigen::Index>(psi.size()));
        const Eigen::VectorXd resid = d.y - d.X * gamma;
        const double log_alpha = model.weights[static_cast<std::size_t>(c)] > 0.0
                                     ? std::log(model.weights[static_cast<std::size_t>(c)])
                                     : -std::numeric_limits<double>::infinity();
        terms.col(c) = (-inv_2s2) * resid.array().square() + log_norm + log_alpha;
    }
    return terms;
}

// Weighted least squares for one mode; nullopt if singular after the ridge.
std::optional<Eigen::VectorXd> weighted_ar_solve(const Design& d, const Eigen::VectorXd& w) {
    const int lag = static_cast<int>(d.X.cols());
    const Eigen::MatrixXd gram = d.X.transpose() * w.asDiagonal() * d.X;
    const Eigen::VectorXd rhs = d.X.transpose() * (w.array() * d.y.array()).matrix();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
    const double s_max = svd.singularValues()(0);
    const double s_min = svd.singularValues()(lag - 1);

    Eigen::MatrixXd system = gram;
    if (!(s_min > 0.0) || s_max / s_min > kConditionLimit) {
        const double ridge = kRidgeScale * gram.trace() / lag;
        if (!(ridge > 0.0)) return std::nullopt;  // zero Gram: nothing to regularize
        system.diagonal().array() += ridge;
    }
    Eigen::VectorXd gamma = system.ldlt().solve(rhs);
    if (!gamma.allFinite()) return std::nullopt;
    return gamma;
}

MixtureARModel m_step_impl(const Responsibilities& resp, const Design& d) {
    const int n = resp.n;
    const int m = resp.m;
    MixtureARModel model;
    model.weights.resize(static_cast<std::size_t>(m));
    model.modes.reserve(static_cast<std::size_t>(m));

    double sse = 0.0;
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = resp.at(i, c);
        model.weights[static_cast<std::size_t>(c)] = w.sum() / n;

        const auto gamma = weighted_ar_solve(d, w);
        if (!gamma) throw SingularSystem("weighted Gram matrix is singular");
        const Eigen::VectorXd resid = d.y - d.X * *gamma;
        sse += (w.array() * resid.array().square()).sum();
        model.modes.emplace_back(std::vector<double>(gamma->data(), gamma->data() + gamma->size()));
    }
    model.sigma2 = std::max(sse / n, kSigma2Floor);
    return model;
}

double log_likelihood_impl(const MixtureARModel& model, const Design& d) {
    const Eigen::MatrixXd terms = log_component_terms(model, d);
    double total = 0.0;
    for (int i = 0; i < terms.rows(); ++i) {
        const double top = terms.row(i).maxCoeff();
        if (!std::isfinite(top)) return -std::numeric_limits<double>::infinity();
        double acc = 0.0;
        for (int c = 0; c < terms.cols(); ++c) acc += std::exp(terms(i, c) - top);
        total += top + std::log(acc);
    }
    return total;
}

Responsibilities e_step_impl(const MixtureARModel& model, const Design& d) {
    const Eigen::MatrixXd terms = log_component_terms(model, d);
    Responsibilities resp;
    resp.n = static_cast<int>(terms.rows());
    resp.m = static_cast<int>(terms.cols());
    resp.values.resize(static_cast<std::size_t>(resp.n) * resp.m);
    for (int i = 0; i < resp.n; ++i) {
        const double top = terms.row(i).maxCoeff();
        if (!std::isfinite(top)) {
            for (int c = 0; c < resp.m; ++c) resp.at(i, c) = 1.0 / resp.m;  // all underflowed
            continue;
        }
        double denom = 0.0;
        for (int c = 0; c < resp.m; ++c) denom += std::exp(terms(i, c) - top);
        for (int c = 0; c < resp.m; ++c) resp.at(i, c) = std::exp(terms(i, c) - top) / denom;
    }
    return resp;
}

// Least-squares AR fit on a contiguous window of design rows.
std::optional<Eigen::VectorXd> window_ls(const Design& d, int start, int len) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d.y.size());
    w.segment(start, len).setOnes();
    return weighted_ar_solve(d, w);
}

struct EmRun {
    MixtureARModel model;
    double log_lik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

EmRun run_em_once(const Design& d, const TimeSeries& series, int n_modes, int max_iter, double tol,
                  std::uint64_t seed) {
    const int n = series.n_obs();
    const int lag = series.lag();
    Rng rng(seed);

    // Initialize modes from least squares on random contiguous segments,
    // uniform weights, sigma2 from the pooled best-mode residuals.
    const int window = std::clamp(n / std::max(n_modes, 1), std::min(lag + 2, n), n);
    MixtureARModel model;
    model.weights.assign(static_cast<std::size_t>(n_modes), 1.0 / n_modes);
    for (int c = 0; c < n_modes; ++c) {
        const int start = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n - window + 1)));
        const auto gamma = window_ls(d, start, window);
        if (gamma)
            model.modes.emplace_back(std::vector<double>(gamma->data(), gamma->data() + gamma->size()));
        else
            model.modes.emplace_back(std::vector<double>(static_cast<std::size_t>(lag), 0.0));
    }
    double init_sse = 0.0;
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& mode : model.modes) {
            const auto& psi = mode.coefficients();
            double pred = 0.0;
            for (int l = 0; l < lag; ++l) pred += psi[static_cast<std::size_t>(l)] * d.X(i, l);
            best = std::min(best, (d.y(i) - pred) * (d.y(i) - pred));
        }
        init_sse += best;
    }
    model.sigma2 = std::max(init_sse / n, kSigma2Floor);

    EmRun run;
    double prev = log_likelihood_impl(model, d);
    for (int it = 0; it < max_iter; ++it) {
        model = m_step_impl(e_step_impl(model, d), d);
        const double cur = log_likelihood_impl(model, d);
        run.trace.push_back(cur);
        run.iterations = it + 1;
        if (std::abs(cur - prev) < tol) {
            run.converged = true;
            prev = cur;
            break;
        }
        prev = cur;
    }
    run.model = std::move(model);
    run.log_lik = prev;
    return run;
}

}  // namespace

TimeSeries TimeSeries::from_chronological(std::vector<double> values, int lag) {
    if (lag < 1) throw std::invalid_argument("lag must be >= 1");
    if (static_cast<int>(values.size()) < lag + 1)
        throw std::invalid_argument("series too short: need at least lag presample values plus one observation");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("series values must be finite");
    return TimeSeries(std::move(values), lag);
}

void MixtureARModel::validate() const {
    if (modes.empty()) throw std::invalid_argument("model needs at least one mode");
    if (weights.size() != modes.size()) throw LengthMismatch("weights and modes differ in count");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    for (const auto& mode : modes)
        if (mode.length() != lag()) throw LengthMismatch("modes must share one length");
}

double log_likelihood(const MixtureARModel& model, const TimeSeries& series) {
    if (model.lag() != series.lag()) throw LengthMismatch("model lag does not match series lag");
    return log_likelihood_impl(model, build_design(series));
}

Responsibilities e_step(const MixtureARModel& model, const TimeSeries& series) {
    if (model.lag() != series.lag()) throw LengthMismatch("model lag does not match series lag");
    return e_step_impl(model, build_design(series));
}

MixtureARModel m_step(const Responsibilities& resp, const TimeSeries& series) {
    if (resp.n != series.n_obs()) throw LengthMismatch("responsibilities do not match series length");
    return m_step_impl(resp, build_design(series));
}

FitResult fit_em(const TimeSeries& series, int n_modes, int max_iter, double tol, int n_restarts,
                 std::uint64_t rng_seed) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (n_restarts < 1) n_restarts = 1;

    const Design d = build_design(series);
    std::optional<FitResult> best;
    std::optional<SingularSystem> last_error;
    for (int r = 0; r < n_restarts; ++r) {
        try {
            EmRun run = run_em_once(d, series, n_modes, max_iter, tol,
                                    derive_seed(rng_seed, static_cast<std::uint64_t>(r)));
            if (!best || run.log_lik > best->log_likelihood) {
                best = FitResult{std::move(run.model), run.log_lik, run.iterations, run.converged, r,
                                 std::move(run.trace)};
            }
        } catch (const SingularSystem& err) {
            last_error = err;  // discard this restart
        }
    }
    if (!best) throw last_error.value_or(SingularSystem("all EM restarts failed"));
    return *best;
}

double empirical_mspe(const MixtureARModel& model, const TimeSeries& series) {
    if (model.lag() != series.lag()) throw LengthMismatch("model lag does not match series lag");
    const Design d = build_design(series);
    const int n = static_cast<int>(d.y.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& mode : model.modes) {
            const auto& psi = mode.coefficients();
            double pred = 0.0;
            for (std::size_t l = 0; l < psi.size(); ++l) pred += psi[l] * d.X(i, static_cast<int>(l));
            const double r = d.y(i) - pred;
            best = std::min(best, r * r);
        }
        total += best;
    }
    return total / n;
}

double classification_mspe(const MixtureARModel& model, const TimeSeries& series) {
    if (model.lag() != series.lag()) throw LengthMismatch("model lag does not match series lag");
    const Design d = build_design(series);
    const Eigen::MatrixXd terms = log_component_terms(model, d);
    const int n = static_cast<int>(d.y.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        int assigned = 0;
        for (int c = 1; c < terms.cols(); ++c)
            if (terms(i, c) > terms(i, assigned)) assigned = c;
        const auto& psi = model.modes[static_cast<std::size_t>(assigned)].coefficients();
        double pred = 0.0;
        for (std::size_t l = 0; l < psi.size(); ++l) pred += psi[l] * d.X(i, static_cast<int>(l));
        const double r = d.y(i) - pred;
        total += r * r;
    }
    return total / n;
}

namespace {
double free_parameters(const FitResult& fit) {
    const int m = fit.model.n_modes();
    return static_cast<double>(m * fit.model.lag() + (m - 1) + 1);
}
}  // namespace

double aic(const FitResult& fit, int n_obs) {
    (void)n_obs;
    return -2.0 * fit.log_likelihood + 2.0 * free_parameters(fit);
}

double bic(const FitResult& fit, int n_obs) {
    return -2.0 * fit.log_likelihood + free_parameters(fit) * std::log(static_cast<double>(n_obs));
}

}  // namespace argap
