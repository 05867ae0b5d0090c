#pragma once

#include <cstdint>
#include <vector>

#include "argap/filter.hpp"

namespace argap {

// Observations x_1..x_N of a lag-L autoregression together with the L
// presample values x_{1-L}..x_0 the first prediction conditions on.
// Values are stored chronologically: data()[0] = x_{1-L}, data()[L-1] = x_0,
// data()[L] = x_1, ... data()[L+N-1] = x_N.
class TimeSeries {
public:
    // First `lag` entries of `values` are the presample.
    static TimeSeries from_chronological(std::vector<double> values, int lag);

    int lag() const { return lag_; }
    int n_obs() const { return static_cast<int>(data_.size()) - lag_; }
    const std::vector<double>& data() const { return data_; }

    // x_n for n in [1, N].
    double x(int n) const { return data_[static_cast<std::size_t>(lag_ + n - 1)]; }
    // x_{n-l}, the l-th regressor of x_n (l in [1, L]).
    double regressor(int n, int l) const { return data_[static_cast<std::size_t>(lag_ + n - 1 - l)]; }

private:
    TimeSeries(std::vector<double> data, int lag) : data_(std::move(data)), lag_(lag) {}
    std::vector<double> data_;
    int lag_;
};

// Mixture of M mode filters sharing one innovation variance:
//   x_n ~ sum_m weights[m] * Normal(modes[m]' x_n, sigma2).
struct MixtureARModel {
    std::vector<double> weights;
    std::vector<Filter> modes;
    double sigma2 = 1.0;

    int n_modes() const { return static_cast<int>(modes.size()); }
    int lag() const { return modes.empty() ? 0 : modes.front().length(); }
    void validate() const;  // simplex weights, positive sigma2, equal lengths
};

// Posterior mode memberships w_nm from the E-step; rows sum to 1.
struct Responsibilities {
    int n = 0;
    int m = 0;
    std::vector<double> values;  // row-major n x m

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * m + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * m + col]; }
};

struct FitResult {
    MixtureARModel model;
    double log_likelihood = 0.0;
    int n_iterations = 0;
    bool converged = false;
    int restart_index = 0;
    std::vector<double> loglik_trace;  // after each EM iteration of the winning restart
};

double log_likelihood(const MixtureARModel& model, const TimeSeries& series);

Responsibilities e_step(const MixtureARModel& model, const TimeSeries& series);

// Closed-form maximization given responsibilities: per-mode weighted least
// squares for the filters, responsibility means for the weights, pooled
// weighted residual for sigma2 (floored at 1e-12).  Near-singular Gram
// matrices get a 1e-10 * trace/L ridge; throws SingularSystem if a system
// stays singular after that.
MixtureARModel m_step(const Responsibilities& resp, const TimeSeries& series);

// Best of n_restarts EM runs (highest final log-likelihood, ties to the
// lowest restart index).  Restarts that raise SingularSystem are discarded;
// the error propagates only if every restart fails.
FitResult fit_em(const TimeSeries& series, int n_modes, int max_iter, double tol, int n_restarts,
                 std::uint64_t rng_seed);

// In-sample one-step MSPE with the per-point best mode:
//   (1/N) sum_n min_m (x_n - modes[m]' x_n)^2.
double empirical_mspe(const MixtureARModel& model, const TimeSeries& series);

// In-sample one-step MSPE with each point predicted by its posterior-most-
// probable mode (ties to the lowest index).  Equals empirical_mspe when the
// weights are uniform; with fitted weights the posterior penalizes
// low-weight modes, which damps the per-point-minimum's tendency to chase
// noise as modes are added.
double classification_mspe(const MixtureARModel& model, const TimeSeries& series);

// Standard information criteria with p = M*L + (M-1) + 1 free parameters.
double aic(const FitResult& fit, int n_obs);
double bic(const FitResult& fit, int n_obs);

}  // namespace argap
