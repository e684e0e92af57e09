#pragma once

#include <vector>

#include "volterra/bracket.hpp"
#include "volterra/invariants.hpp"
#include "volterra/lattice.hpp"
#include "volterra/spectral.hpp"

namespace volterra {

// g_i = partial f / partial c_i for a scalar function of the operator.
using Gradient = std::vector<double>;

// {f,g} = sum gf_i {c_i,c_j} gg_j with the structure constants of the chosen
// bracket; antisymmetric in (gf, gg) exactly (symmetric evaluation order).
double bracket_eval(BracketKind kind, const Gradient& gf, const Gradient& gg,
                    const std::vector<double>& c);

// Sum of |term| over the same accumulation: the roundoff yardstick for
// residuals that should cancel to zero.
double bracket_abs_scale(BracketKind kind, const Gradient& gf, const Gradient& gg,
                         const std::vector<double>& c);

// Value of the structure polynomial {c_i, c_j} and (optionally) its gradient.
double structure_constant(BracketKind kind, int i, int j, const std::vector<double>& c,
                          Gradient* grad = nullptr);

// --- analytic gradients -------------------------------------------------------

Gradient grad_i(const PeriodicOperator& op, int i);
Gradient grad_j(const PeriodicOperator& op, int k);

// First-order perturbation of the Dirichlet matrix: d lambda_k / d c_i =
// v_k^T (dB/dc_i) v_k.  k indexes the positive eigenvalues ascending, 0-based.
Gradient grad_dirichlet(const PeriodicOperator& op, int k, const ToleranceConfig& tol = {});

// Central finite differences of p_k = 2 ln|rho_k| / lambda_k^m with per-slot
// step h = max(fd_step, 3e-5) * max(1, c_i), sheet tracking across the
// perturbation and a Richardson half-step pass.  Raises SheetFlip after 5
// failed halvings.  The step floor keeps the divisor-chart noise (amplified
// by lambda_min^-3 in the cubic momenta) below the canonicity tolerance at
// T = 21.
Gradient grad_p(const PeriodicOperator& op, int k, BracketKind kind, const ToleranceConfig& tol = {});

// All N momentum gradients from one sweep of perturbed divisor charts.
std::vector<Gradient> grad_p_all(const PeriodicOperator& op, BracketKind kind,
                                 const ToleranceConfig& tol = {});

// --- canonical structures -------------------------------------------------------

struct CanonicalChart {
    std::vector<double> q;   // positive Dirichlet eigenvalues, ascending
    std::vector<double> p;   // 2 ln|rho_k| / lambda_k^m on the divisor sheet
    std::vector<int> sheet;
};

CanonicalChart canonical_chart(const PeriodicOperator& op, BracketKind kind,
                               const ToleranceConfig& tol = {});

// max |{lambda_i, lambda_j}| over all pairs (sign pairs included by
// bilinearity), with analytic Dirichlet gradients.
double verify_involution(const PeriodicOperator& op, BracketKind kind,
                         const ToleranceConfig& tol = {});

struct CanonicalCheck {
    Matrix qp;  // {q_i, p_j}
    Matrix pp;  // {p_i, p_j}
    double max_qp_deviation = 0.0;  // from the identity matrix
    double max_pp_deviation = 0.0;  // from zero
    int sheet_flips = 0;            // divisor points re-tagged during the rerun
};

// {q_i, p_j} = delta_ij and {p_i, p_j} = 0.  A diagonal entry near -1 flips
// the sheet of that divisor point (p_k -> -p_k) and the check reruns once;
// CanonicityFailure if neither assignment lands near the identity.
CanonicalCheck verify_canonical(const PeriodicOperator& op, BracketKind kind,
                                const ToleranceConfig& tol = {});

struct AnnulatorCheck {
    double quadratic_max_rel = 0.0;  // max_i |{I_0, c_i}_1| / scale
    double cubic_max_rel = 0.0;      // max_i |{I_N, c_i}_2| / scale
};

AnnulatorCheck verify_annulator(const PeriodicOperator& op);

struct LenardMagriCheck {
    double max_chain_rel = 0.0;       // over {I_0,f}_1, {I_k,f}_2 + {I_{k+1},f}_1, {I_N,f}_2
    double max_generating_rel = 0.0;  // {Delta,f}_2 = lambda^2 {Delta,f}_1 at sample lambdas
};

LenardMagriCheck lenard_magri_check(const PeriodicOperator& op, const Gradient& gf,
                                    const std::vector<double>& lambda_samples);

// Brute-force cyclic sums {{c_i,c_j},c_l} + cyc over all coordinate triples,
// relative to the accumulated term scale.
double jacobi_identity_max(const PeriodicOperator& op, BracketKind kind);

}  // namespace volterra
