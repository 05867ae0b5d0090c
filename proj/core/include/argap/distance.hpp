#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

#include "argap/filter.hpp"

namespace argap {

// Mean-squared-prediction-error distance between AR filters: the excess
// one-step MSPE incurred by predicting an AR(psi_a) process (innovation
// variance sigma2) with psi_b instead of psi_a.  Asymmetric by nature.
//
// Evaluated in closed form as a residue sum over the characteristic roots;
// inputs with a near-zero generator root or a near-coincident generator
// root pair (threshold 1e-7), and residue sums whose imaginary part fails
// to cancel to 1e-8 relative, are routed to the 16384-point quadrature.
// Throws UnstableGenerator if psi_a is not stable.
double filter_distance(const Filter& psi_a, const Filter& psi_b, double sigma2);

// Same distance by fixed-rule quadrature of the spectral integral
//   sigma2/(2*pi) * Int_{-pi}^{pi} |PsiA - PsiB|^2 / |1 - PsiA|^2 dw
// over n_points >= 64 equispaced nodes.  Converges to filter_distance as
// n_points grows; serves as the independent oracle for the residue form.
double filter_distance_quadrature(const Filter& psi_a, const Filter& psi_b, double sigma2,
                                  int n_points = 8192);

// Stationary autocovariance matrix Gamma of the AR(psi_a) process with
// Gamma(i,j) = Cov(x_{n-1-i}, x_{n-1-j}), from the Yule-Walker system.
// Gives the third route: D(a, b) = (psi_a - psi_b)' Gamma (psi_a - psi_b).
Eigen::MatrixXd autocovariance_form(const Filter& psi_a, double sigma2);

namespace detail {

// Residue-sum distance over precomputed root lists; valid == false means
// the inputs were degenerate or the sum was too ill-conditioned, and the
// caller must fall back to quadrature.
struct ResidueResult {
    double value = 0.0;
    bool valid = false;
};

ResidueResult residue_distance(std::span<const std::complex<double>> roots_a,
                               std::span<const std::complex<double>> roots_b, double sigma2);

// filter_distance body for callers that already hold the generator's roots
// (pairwise tables compute each filter's roots once).
double distance_with_roots(std::span<const std::complex<double>> roots_a,
                           std::span<const std::complex<double>> roots_b, const Filter& psi_a,
                           const Filter& psi_b, double sigma2);

}  // namespace detail

}  // namespace argap
