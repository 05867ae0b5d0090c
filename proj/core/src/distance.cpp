#include "argap/distance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "argap/errors.hpp"

namespace argap {

namespace {

constexpr double kDegenerateGap = 1e-7;
constexpr double kImagRelTol = 1e-8;
constexpr double kNegativeTol = 1e-10;
constexpr int kFallbackPoints = 16384;

bool degenerate_generator(std::span<const std::complex<double>> roots_a) {
    for (std::size_t k = 0; k < roots_a.size(); ++k) {
        if (std::abs(roots_a[k]) < kDegenerateGap) return true;
        for (std::size_t l = k + 1; l < roots_a.size(); ++l)
            if (std::abs(roots_a[k] - roots_a[l]) < kDegenerateGap) return true;
    }
    return false;
}

std::complex<double> horner_psi(const Filter& f, std::complex<double> u) {
    // sum_l psi_l u^l  with u = e^{jw}  (the value of Psi at z = e^{-jw})
    const auto& psi = f.coefficients();
    std::complex<double> acc = 0.0;
    for (std::size_t l = psi.size(); l-- > 0;) acc = (acc + psi[l]) * u;
    return acc;
}

}  // namespace

namespace detail {

ResidueResult residue_distance(std::span<const std::complex<double>> roots_a,
                               std::span<const std::complex<double>> roots_b, double sigma2) {
    const std::size_t L = roots_a.size();
    std::complex<double> total = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        const std::complex<double> ak = roots_a[k];
        std::complex<double> numer = 1.0;
        for (const auto& b : roots_b) numer *= ak - b;
        std::complex<double> denom = ak;
        for (std::size_t l = 0; l < L; ++l)
            if (l != k) denom *= ak - roots_a[l];
        std::complex<double> ratio = 1.0;
        for (std::size_t l = 0; l < L; ++l)
            ratio *= (1.0 - ak * std::conj(roots_b[l])) / (1.0 - ak * std::conj(roots_a[l]));
        total += numer / denom * (ratio - 1.0);
    }
    total *= sigma2;

    ResidueResult out;
    const double scale = std::max(std::abs(total.real()), 1e-12);
    if (std::abs(total.imag()) > kImagRelTol * scale) return out;  // cancellation failed
    double value = total.real();
    if (value < 0.0) {
        if (value < -kNegativeTol) return out;
        value = 0.0;
    }
    out.value = value;
    out.valid = true;
    return out;
}

double distance_with_roots(std::span<const std::complex<double>> roots_a,
                           std::span<const std::complex<double>> roots_b, const Filter& psi_a,
                           const Filter& psi_b, double sigma2) {
    if (!degenerate_generator(roots_a)) {
        const auto res = residue_distance(roots_a, roots_b, sigma2);
        if (res.valid) return res.value;
    }
    return filter_distance_quadrature(psi_a, psi_b, sigma2, kFallbackPoints);
}

}  // namespace detail

double filter_distance(const Filter& psi_a, const Filter& psi_b, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
    if (psi_a.length() != psi_b.length()) throw LengthMismatch("filters must have equal length");
    if (!is_stable(psi_a.coefficients())) throw UnstableGenerator("generating filter is not stable");
    const auto roots_a = characteristic_roots(psi_a);
    const auto roots_b = characteristic_roots(psi_b);
    return detail::distance_with_roots(roots_a, roots_b, psi_a, psi_b, sigma2);
}

double filter_distance_quadrature(const Filter& psi_a, const Filter& psi_b, double sigma2,
                                  int n_points) {
    if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
    if (psi_a.length() != psi_b.length()) throw LengthMismatch("filters must have equal length");
    if (n_points < 64) throw std::invalid_argument("n_points must be >= 64");
    if (!is_stable(psi_a.coefficients())) throw UnstableGenerator("generating filter is not stable");

    // Trapezoid rule on a periodic integrand collapses to the node mean.
    double acc = 0.0;
    const double step = 2.0 * std::numbers::pi / n_points;
    for (int i = 0; i < n_points; ++i) {
        const double w = -std::numbers::pi + step * i;
        const std::complex<double> u(std::cos(w), std::sin(w));
        const std::complex<double> pa = horner_psi(psi_a, u);
        const std::complex<double> pb = horner_psi(psi_b, u);
        acc += std::norm(pa - pb) / std::norm(1.0 - pa);
    }
    return sigma2 * acc / n_points;
}

Eigen::MatrixXd autocovariance_form(const Filter& psi_a, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
    if (!is_stable(psi_a.coefficients())) throw UnstableGenerator("generating filter is not stable");

    // gamma(k) - sum_l psi_l gamma(|k-l|) = sigma2 * [k == 0],  k = 0..L.
    const int L = psi_a.length();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(L + 1, L + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L + 1);
    rhs(0) = sigma2;
    for (int k = 0; k <= L; ++k) {
        sys(k, k) += 1.0;
        for (int l = 1; l <= L; ++l) sys(k, std::abs(k - l)) -= psi_a.psi(l);
    }
    const Eigen::VectorXd gamma = sys.partialPivLu().solve(rhs);

    Eigen::MatrixXd cov(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) cov(i, j) = gamma(std::abs(i - j));
    return cov;
}

}  // namespace argap
