#pragma once

#include <complex>
#include <vector>

#include "volterra/lattice.hpp"
#include "volterra/linalg.hpp"
#include "volterra/poly.hpp"

namespace volterra {

using Complex = std::complex<double>;

// 2x2 matrix with polynomial entries, acting on states v_n = (psi_n, psi_{n-1}).
struct PolyMat2 {
    Poly m11, m12, m21, m22;

    static PolyMat2 identity();
    Poly det() const { return m11 * m22 - m12 * m21; }
    Poly trace() const { return m11 + m22; }

    friend PolyMat2 operator*(const PolyMat2& lhs, const PolyMat2& rhs);
};

// Numeric 2x2 for evaluation at a fixed spectral parameter.
template <class S>
struct Mat2 {
    S m11{}, m12{}, m21{}, m22{};
    S det() const { return m11 * m22 - m12 * m21; }
    S trace() const { return m11 + m22; }
};

struct MonodromyMatrix {
    PolyMat2 m;
    const Poly& trace_poly() const { return trace_; }
    explicit MonodromyMatrix(PolyMat2 mat) : m(std::move(mat)), trace_(m.trace()) {}

private:
    Poly trace_;
};

// Coefficients I_0..I_N of the Floquet discriminant
// Delta(lambda) = sum_i (-1)^i I_i lambda^{2N+1-2i}  (odd, degree 2N+1).
struct DeltaPolynomial {
    std::vector<double> I;

    DeltaPolynomial() = default;
    explicit DeltaPolynomial(std::vector<double> coeffs);

    int gaps() const { return static_cast<int>(I.size()) - 1; }
    const Poly& poly() const { return poly_; }

private:
    Poly poly_;
};

struct SpectralCurve {
    std::vector<Complex> branch_plus;   // roots of Delta - 2
    std::vector<Complex> branch_minus;  // roots of Delta + 2
    bool nonsingular = false;
    int n_gaps = 0;

    double max_branch_modulus() const;
};

struct DivisorData {
    std::vector<double> lambda;  // the N positive Dirichlet eigenvalues, ascending
    std::vector<double> rho;     // Floquet multiplier on the divisor sheet (real, may be negative)
    std::vector<int> sheet;      // +1: |rho| > 1, -1: |rho| < 1
};

// --- transfer / monodromy ---------------------------------------------------

// A_n(lambda) maps (psi_n, psi_{n-1}) to (psi_{n+1}, psi_n):
// top row (lambda/a_{n+1}, -a_n/a_{n+1}), bottom row (1, 0).  Indices cyclic.
PolyMat2 transfer_step(const PeriodicOperator& op, int n);

// M = A_{T-1} ... A_1 A_0.  det M == 1 by telescoping of a_n / a_{n+1}.
MonodromyMatrix monodromy(const PeriodicOperator& op);

// Same product evaluated numerically at a fixed lambda.
template <class S>
Mat2<S> monodromy_at(const PeriodicOperator& op, S lam) {
    Mat2<S> m{S(1), S(0), S(0), S(1)};
    int t = op.period();
    for (int n = 0; n < t; ++n) {
        S p = S(lam) / S(op.a(n + 1));
        S q = S(-op.a(n) / op.a(n + 1));
        Mat2<S> next;
        next.m11 = p * m.m11 + q * m.m21;
        next.m12 = p * m.m12 + q * m.m22;
        next.m21 = m.m11;
        next.m22 = m.m12;
        m = next;
    }
    return m;
}

// --- discriminant, two independent routes ------------------------------------

// Reads I_i off the monodromy trace; raises ParityViolation if an even-power
// coefficient survives beyond eq_tol (implementation bug, not bad input).
DeltaPolynomial delta_from_monodromy(const PeriodicOperator& op,
                                     const ToleranceConfig& tol = {});

// All size-i subsets of Z_T with no two elements cyclically adjacent,
// lexicographic.  Count is T/(T-i) * C(T-i, i).
std::vector<std::vector<int>> enumerate_totally_disconnected(int period, int size);
long long totally_disconnected_count(int period, int size);

// I_0 = 1/prod a_i;  I_i = I_0 * sum over totally disconnected subsets of prod c_j.
DeltaPolynomial delta_combinatorial(const PeriodicOperator& op);

// I_N = I_0 * sum_k c_k c_{k+2} ... c_{k+2N-2} (indices mod T).
double i_n_closed_form(const PeriodicOperator& op);

// --- curve, Dirichlet spectrum, Floquet multipliers --------------------------

SpectralCurve spectral_curve(const DeltaPolynomial& delta, const ToleranceConfig& tol = {});

// Dirichlet problem psi_0 = psi_T = 0: symmetric tridiagonal (T-1)x(T-1)
// matrix with zero diagonal and off-diagonal a_2..a_{T-1}.
Matrix dirichlet_matrix(const PeriodicOperator& op);
SymmetricEigen dirichlet_eigen(const PeriodicOperator& op);

// The N positive Dirichlet eigenvalues; raises DegenerateSpectrum when two
// eigenvalues collide within sep_tol.
DivisorData dirichlet_spectrum(const PeriodicOperator& op, const ToleranceConfig& tol = {});

// rho on the requested sheet, rho + 1/rho = Delta(lambda).  The P_- sheet
// (sheet = -1) is the one with |rho| < 1; off the real spectral bands this
// agrees with analytic continuation from the large-lambda reference point,
// where rho -> 0 as lambda -> +inf.  On a band the sheet is resolved by the
// upper-half-plane limit.
Complex floquet_rho(const DeltaPolynomial& delta, Complex lam, int sheet,
                    const ToleranceConfig& tol = {}, bool require_distinct_sheets = false);

// y = rho - Delta/2 on the requested sheet; y^2 = Delta^2/4 - 1.
Complex curve_y(const DeltaPolynomial& delta, Complex lam, int sheet,
                const ToleranceConfig& tol = {});

// Picks, for every Dirichlet eigenvalue, the Floquet multiplier whose
// eigenvector is compatible with psi_0 = psi_T = 0 (the sheet carrying the
// Bloch-function pole): rho_k = m22(lambda_k), tagged by modulus.
DivisorData resolve_divisor_sheets(const PeriodicOperator& op, const DeltaPolynomial& delta,
                                   const DivisorData& dirichlet, const ToleranceConfig& tol = {});

// psi_0 = 1, psi_1 from the rho-eigenvector, the rest by the recursion.
// Quasi-periodicity psi_{n+T} = rho psi_n holds within eq_tol * max|psi|.
std::vector<Complex> bloch_function(const PeriodicOperator& op, const DeltaPolynomial& delta,
                                    Complex lam, int sheet, int n_max,
                                    const ToleranceConfig& tol = {});

}  // namespace volterra
