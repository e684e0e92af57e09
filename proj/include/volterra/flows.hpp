#pragma once

#include <functional>
#include <vector>

#include "volterra/lattice.hpp"

namespace volterra {

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> states;  // weight vectors at the grid times
    int flow = 1;
    long long steps = 0;
    double endpoint_error_estimate = 0.0;  // relative change under the last step halving
};

// cdot_i = c_i (c_{i+1} - c_{i-1}), cyclic.
std::vector<double> volterra_rhs(const std::vector<double>& c);

// k-th flow: cdot_i = c_i (c_{i+1} g_{i+1} - c_{i-1} g_{i-1}) with g the
// gradient of the k-th trace invariant.  k = 1 reproduces volterra_rhs
// bit for bit.
std::vector<double> higher_rhs(const PeriodicOperator& op, int k);

// Same flow through the cubic bracket with the (k-1)-th hamiltonian; the
// bi-Hamiltonian cross-check.
std::vector<double> higher_rhs_cubic_route(const PeriodicOperator& op, int k);

struct StepControl {
    double initial_dt = 0.05;
    double endpoint_rel_tol = 1e-8;
    int max_halvings = 12;
    int output_samples = 64;
};

// Classical fixed-step RK4 with an automatic step-halving loop: the step is
// accepted once halving moves the endpoint by less than endpoint_rel_tol.
// Raises PositivityLoss if any weight leaves (0, inf), StepLimitExceeded if
// the halving budget runs out.
Trajectory integrate(const PeriodicOperator& op, int k, double t_end, StepControl ctl = {});

// Generic RK4 map for test harnesses: advances c by time span with nsteps
// fixed steps of the supplied field.
std::vector<double> rk4_map(const std::function<std::vector<double>(const std::vector<double>&)>& field,
                            std::vector<double> c, double span, int nsteps);

// || flow_k(eps) flow_l(eps) - flow_l(eps) flow_k(eps) ||_inf; O(eps^3) for
// commuting flows.
double commutativity_residual(const PeriodicOperator& op, int k, int l, double eps);

struct ConservationReport {
    std::vector<double> i_drift;          // per-coefficient max relative drift
    std::vector<double> j_drift;          // per-invariant max relative drift
    double delta_at_probe_drift = 0.0;    // Delta(lambda*) at a fixed regular probe
    std::vector<double> dirichlet_drift;  // informational: these are NOT conserved
};

ConservationReport conservation_report(const Trajectory& traj);

}  // namespace volterra
