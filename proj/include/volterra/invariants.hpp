#pragma once

#include <vector>

#include "volterra/bracket.hpp"
#include "volterra/lattice.hpp"
#include "volterra/linalg.hpp"
#include "volterra/spectral.hpp"

namespace volterra {

// Symmetric cyclic zero-diagonal matrix: a_1..a_{2N} on the sub/super
// diagonal, a_0 in both corners.  Its eigenvalues are the roots of Delta = 2.
Matrix lax_matrix(const PeriodicOperator& op);
double lax_spectral_radius(const PeriodicOperator& op);

struct InvariantSet {
    std::vector<double> J;  // J_0 = sum ln a_i, J_k = tr L^{2k} / 2k
};

InvariantSet invariant_set(const PeriodicOperator& op);
double j_trace(const PeriodicOperator& op, int k);

// The Newton-identity route: J_k from I_1..I_N via the constrained
// multinomial sum over j_1 + 2 j_2 + ... + N j_N = k.
double j_from_i(const DeltaPolynomial& delta, int k);

struct SeriesExpansion {
    double log_coefficient = 0.0;  // multiplies ln(lambda)
    std::vector<double> coeffs;    // coeffs[k] multiplies lambda^{-(offset + step*k)}
    int power_step = 2;
    int power_offset = 0;
    double fit_error_estimate = 0.0;  // 0 for exact series routes
    double fit_condition = 0.0;

    double coeff(int k) const { return coeffs[static_cast<std::size_t>(k)]; }
    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// ln Delta = ln I_0 + (2N+1) ln lambda + ln(1 + sum (-1)^i (I_i/I_0) x^i),
// expanded symbolically in x = lambda^{-2} through x^order.
SeriesExpansion expand_log_delta(const DeltaPolynomial& delta, int order);

// Least-squares extraction of the coefficients of
// ln rho(lambda) = -(2N+1) ln lambda + b_0 + sum b_k lambda^{-2k} on the P_-
// sheet, sampled at geometrically spaced lambda beyond the last branch point.
SeriesExpansion expand_log_rho(const PeriodicOperator& op, const DeltaPolynomial& delta, int order,
                               const ToleranceConfig& tol = {});

// Q = 2 ln rho / lambda^m on the P_- sheet (m = 1 quadratic, m = 3 cubic).
// Real convention: |rho| is used, so the value stays real in every gap.
double q_form(const DeltaPolynomial& delta, double lam, BracketKind kind,
              const ToleranceConfig& tol = {});

struct ExpansionCheck {
    std::vector<double> fitted;    // coefficient of lambda^{-2k-1} in Q, k = 1..N
    std::vector<double> expected;  // 2 J_k (quadratic) or 2 J_{k-1} (cubic)
    double max_rel_error = 0.0;
    double fit_error_estimate = 0.0;
};

// Expansion of Q at P_- after removing the annulator-dependent terms; the
// surviving odd-power coefficients are twice the flow hamiltonians.
ExpansionCheck check_hamiltonian_expansion(const PeriodicOperator& op, BracketKind kind,
                                           const ToleranceConfig& tol = {});

struct DifferentialCheck {
    double max_rel_error = 0.0;
    double sample_condition = 0.0;       // of the N x N differential sample matrix
    std::vector<double> per_index_error;
};

// Central finite differences of Q in I-space at fixed annulator, compared
// against the holomorphic differentials (+-1)^k lambda^{2(N-k)-2} / y
// (cubic; with the momentum exponent 1 the quadratic case gives exponents
// 2N-2j).  y is evaluated on the P_- sheet throughout.
DifferentialCheck check_differential_basis(const DeltaPolynomial& delta, BracketKind kind,
                                           const std::vector<double>& lam_samples,
                                           const ToleranceConfig& tol = {});

// Default sample set for the checks above: `count` points spread
// geometrically just beyond the last branch point.
std::vector<double> default_lambda_samples(const DeltaPolynomial& delta, int count);

}  // namespace volterra
