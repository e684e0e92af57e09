#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

// Dense real univariate polynomial, coefficients stored in ascending powers.
class Poly {
public:
    Poly() : coef_{0.0} {}
    explicit Poly(std::vector<double> coef);

    static Poly constant(double v) { return Poly({v}); }
    static Poly monomial(int k, double v = 1.0);

    // Index of the highest coefficient above `rel_tol * max|coef|` (0 for the zero polynomial).
    int degree(double rel_tol = 0.0) const;
    double coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coef_.size())) ? coef_[static_cast<std::size_t>(k)] : 0.0;
    }
    const std::vector<double>& coeffs() const { return coef_; }
    double max_abs_coeff() const;

    template <class S>
    S operator()(S x) const {  // Horner
        S acc = S(0);
        for (std::size_t k = coef_.size(); k-- > 0;) acc = acc * x + S(coef_[k]);
        return acc;
    }

    Poly derivative() const;
    Poly& drop_trailing(double rel_tol);

    Poly& operator+=(const Poly& rhs);
    Poly& operator-=(const Poly& rhs);
    Poly& operator*=(double s);

    friend Poly operator+(Poly lhs, const Poly& rhs) { return lhs += rhs; }
    friend Poly operator-(Poly lhs, const Poly& rhs) { return lhs -= rhs; }
    friend Poly operator*(Poly lhs, double s) { return lhs *= s; }
    friend Poly operator*(double s, Poly rhs) { return rhs *= s; }
    friend Poly operator*(const Poly& lhs, const Poly& rhs);

private:
    std::vector<double> coef_;
};

// 1 + max |c_k / c_n|: every root of p lies inside this radius.
double cauchy_root_bound(const Poly& p);

// All complex roots via the balanced companion matrix and a Francis
// double-shift QR sweep.  Throws RootFindingFailure on non-convergence.
std::vector<std::complex<double>> poly_roots(const Poly& p);

}  // namespace volterra
