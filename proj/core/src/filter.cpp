#include "argap/filter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "argap/errors.hpp"

namespace argap {

namespace {

constexpr double kImagCancelTol = 1e-12;   // roots_to_coefficients cancellation
constexpr double kRealRootImagTol = 1e-9;  // complex-vs-real classification
constexpr double kStableModulus = 1.0 - 1e-12;

// Monic coefficients [1, lam_1, ..., lam_L] of prod (z - a_i).
std::vector<std::complex<double>> expand_monic(std::span<const std::complex<double>> roots) {
    std::vector<std::complex<double>> coef{1.0};
    for (const auto& a : roots) {
        coef.push_back(0.0);
        for (std::size_t k = coef.size() - 1; k >= 1; --k) coef[k] -= a * coef[k - 1];
    }
    return coef;
}

std::complex<double> eval_monic(const std::vector<double>& lam, std::complex<double> z) {
    std::complex<double> v = 1.0;
    for (double c : lam) v = v * z + c;
    return v;
}

std::complex<double> eval_monic_deriv(const std::vector<double>& lam, std::complex<double> z) {
    const int L = static_cast<int>(lam.size());
    std::complex<double> v = static_cast<double>(L);
    for (int k = 0; k < L - 1; ++k) v = v * z + static_cast<double>(L - 1 - k) * lam[static_cast<std::size_t>(k)];
    return v;
}

// Roots of z^L + lam_1 z^{L-1} + ... + lam_L via the companion matrix,
// followed by two Newton steps per root.
std::vector<std::complex<double>> monic_roots(const std::vector<double>& lam) {
    const int L = static_cast<int>(lam.size());
    if (L == 1) return {std::complex<double>(-lam[0], 0.0)};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(L, L);
    for (int i = 1; i < L; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < L; ++i) companion(i, L - 1) = -lam[static_cast<std::size_t>(L - 1 - i)];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw RootFindingFailure("companion eigensolver did not converge");

    std::vector<std::complex<double>> roots(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        std::complex<double> z = solver.eigenvalues()(i);
        for (int it = 0; it < 2; ++it) {
            const auto dp = eval_monic_deriv(lam, z);
            if (std::abs(dp) < 1e-12) break;  // multiple root; keep QR estimate
            z -= eval_monic(lam, z) / dp;
        }
        roots[static_cast<std::size_t>(i)] = z;
    }
    return roots;
}

}  // namespace

Filter::Filter(std::vector<double> coefficients) : psi_(std::move(coefficients)) {
    if (psi_.empty()) throw std::invalid_argument("Filter requires L >= 1 coefficients");
    for (double c : psi_)
        if (!std::isfinite(c)) throw std::invalid_argument("Filter coefficients must be finite");
}

RootSet::RootSet(std::vector<ComplexPair> complex_pairs, std::vector<double> reals)
    : pairs_(std::move(complex_pairs)), reals_(std::move(reals)) {
    const int L = order();
    if (L < 1) throw std::invalid_argument("RootSet requires order >= 1");
    for (const auto& p : pairs_) {
        if (!(p.y > 0.0)) throw std::invalid_argument("complex pair representative must have y > 0");
        if (!(p.x * p.x + p.y * p.y < 1.0)) throw NotStable("complex pair outside the unit disk");
    }
    for (double r : reals_)
        if (!(std::abs(r) < 1.0)) throw NotStable("real root outside (-1, 1)");
    std::sort(pairs_.begin(), pairs_.end(),
              [](const ComplexPair& a, const ComplexPair& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    std::sort(reals_.begin(), reals_.end());
}

std::vector<std::complex<double>> RootSet::expanded() const {
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(order()));
    for (const auto& p : pairs_) {
        out.emplace_back(p.x, -p.y);
        out.emplace_back(p.x, p.y);
    }
    for (double r : reals_) out.emplace_back(r, 0.0);
    return out;
}

Filter roots_to_coefficients(const RootSet& roots) {
    const auto expanded = roots.expanded();
    const auto monic = expand_monic(expanded);
    std::vector<double> psi(static_cast<std::size_t>(roots.order()));
    for (std::size_t k = 1; k < monic.size(); ++k) {
        if (std::abs(monic[k].imag()) > kImagCancelTol)
            throw RootFindingFailure("imaginary parts of the coefficient expansion did not cancel");
        psi[k - 1] = -monic[k].real();  // psi_l = -lambda_l
    }
    return Filter(std::move(psi));
}

std::vector<std::complex<double>> characteristic_roots(const Filter& filter) {
    std::vector<double> lam(filter.coefficients().size());
    for (std::size_t k = 0; k < lam.size(); ++k) lam[k] = -filter.coefficients()[k];
    return monic_roots(lam);
}

RootSet coefficients_to_roots(const Filter& filter) {
    const auto roots = characteristic_roots(filter);

    std::vector<std::complex<double>> uppers, lowers;
    std::vector<double> reals;
    for (const auto& z : roots) {
        if (std::abs(z) >= kStableModulus) throw NotStable("root modulus >= 1 - 1e-12");
        if (std::abs(z.imag()) <= kRealRootImagTol)
            reals.push_back(z.real());
        else if (z.imag() > 0.0)
            uppers.push_back(z);
        else
            lowers.push_back(z);
    }
    if (uppers.size() != lowers.size())
        throw RootFindingFailure("complex roots do not pair into conjugates");

    auto by_re_im = [](const std::complex<double>& a, const std::complex<double>& b) {
        return a.real() != b.real() ? a.real() < b.real() : std::abs(a.imag()) < std::abs(b.imag());
    };
    std::sort(uppers.begin(), uppers.end(), by_re_im);
    std::sort(lowers.begin(), lowers.end(), by_re_im);

    std::vector<ComplexPair> pairs;
    pairs.reserve(uppers.size());
    for (std::size_t i = 0; i < uppers.size(); ++i) {
        // Average the numerically independent conjugates.
        const double x = 0.5 * (uppers[i].real() + lowers[i].real());
        const double y = 0.5 * (uppers[i].imag() - lowers[i].imag());
        pairs.push_back({x, y});
    }
    return RootSet(std::move(pairs), std::move(reals));
}

bool is_stable(std::span<const double> coefficients) {
    const std::size_t L = coefficients.size();
    if (L == 0) return false;
    for (double c : coefficients)
        if (!std::isfinite(c)) return false;

    // Step-down recursion on the monic polynomial z^L + lam_1 z^{L-1} + ...
    // with lam = -psi; stable iff every reflection coefficient has |k| < 1.
    std::vector<double> a(L + 1);
    a[0] = 1.0;
    for (std::size_t i = 0; i < L; ++i) a[i + 1] = -coefficients[i];

    for (std::size_t m = L; m >= 1; --m) {
        const double k = a[m];
        if (!(std::abs(k) < 1.0)) return false;
        if (m == 1) break;
        const double denom = 1.0 - k * k;
        std::vector<double> b(m);
        b[0] = 1.0;
        for (std::size_t i = 1; i < m; ++i) b[i] = (a[i] - k * a[m - i]) / denom;
        a = std::move(b);
    }
    return true;
}

std::complex<double> vandermonde(std::span<const std::complex<double>> roots) {
    std::complex<double> v = 1.0;
    for (std::size_t u = 0; u < roots.size(); ++u)
        for (std::size_t w = u + 1; w < roots.size(); ++w) v *= roots[w] - roots[u];
    return v;
}

std::complex<double> vandermonde(const RootSet& roots) {
    const auto expanded = roots.expanded();
    return vandermonde(std::span<const std::complex<double>>(expanded));
}

}  // namespace argap
