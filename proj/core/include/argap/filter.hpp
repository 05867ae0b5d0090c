#pragma once

#include <complex>
#include <span>
#include <vector>

namespace argap {

// Stable-by-convention AR filter psi_1..psi_L for the recursion
//   x_n = psi_1 x_{n-1} + ... + psi_L x_{n-L} + e_n.
// The characteristic roots are the zeros of z^L - sum_l psi_l z^{L-l}.
// Construction does not enforce stability; call is_stable() where the
// contract requires it.
class Filter {
public:
    explicit Filter(std::vector<double> coefficients);

    int length() const { return static_cast<int>(psi_.size()); }
    const std::vector<double>& coefficients() const { return psi_; }
    double psi(int lag_one_based) const { return psi_[static_cast<std::size_t>(lag_one_based - 1)]; }

    bool operator==(const Filter& other) const = default;

private:
    std::vector<double> psi_;
};

// Root-domain representation of a degree-L real polynomial with all roots
// in the open unit disk: c conjugate pairs x +- jy stored via their
// upper-half-plane representative (y > 0), plus L - 2c reals.
//
// Canonical form (pairs sorted by (x, y), reals ascending) makes the
// representation unique; expanded() lists the full multiset as
// (x - jy, x + jy) per pair, pairs first, then the reals.
struct ComplexPair {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const ComplexPair&) const = default;
};

class RootSet {
public:
    RootSet(std::vector<ComplexPair> complex_pairs, std::vector<double> reals);

    int order() const { return static_cast<int>(2 * pairs_.size() + reals_.size()); }
    const std::vector<ComplexPair>& complex_pairs() const { return pairs_; }
    const std::vector<double>& reals() const { return reals_; }

    // Full root multiset in canonical order.
    std::vector<std::complex<double>> expanded() const;

    bool operator==(const RootSet&) const = default;

private:
    std::vector<ComplexPair> pairs_;
    std::vector<double> reals_;
};

// Elementary-symmetric coefficient expansion: psi_l = -lambda_l with
// lambda_k = (-1)^k e_k(roots).  Exact for any valid RootSet; the imaginary
// parts of the expansion cancel to < 1e-12 and are dropped.
Filter roots_to_coefficients(const RootSet& roots);

// Inverse map via companion-matrix eigenvalues with Newton polish.
// Throws NotStable if any root modulus >= 1 - 1e-12, RootFindingFailure if
// the eigensolver fails or conjugate pairing is inconsistent.
RootSet coefficients_to_roots(const Filter& filter);

// Characteristic roots of z^L - sum psi_l z^{L-l}, unconstrained (works for
// unstable filters too; needed because the residue distance evaluates the
// mis-specified filter's roots).
std::vector<std::complex<double>> characteristic_roots(const Filter& filter);

// Schur-Cohn (step-down) stability test on the coefficient vector; strict:
// a root modulus of exactly 1 counts as unstable.  No root finding.
bool is_stable(std::span<const double> coefficients);

// Vandermonde polynomial prod_{u<v} (a_v - a_u) over expanded() order.
std::complex<double> vandermonde(const RootSet& roots);

// Same product over an explicit root list (any order; only |V| is
// order-independent).
std::complex<double> vandermonde(std::span<const std::complex<double>> roots);

}  // namespace argap
