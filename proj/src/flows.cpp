#include "volterra/flows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volterra/invariants.hpp"
#include "volterra/poisson.hpp"
#include "volterra/spectral.hpp"

namespace volterra {

std::vector<double> volterra_rhs(const std::vector<double>& c) {
    int t = static_cast<int>(c.size());
    std::vector<double> rhs(c.size());
    for (int i = 0; i < t; ++i) {
        int ip = (i + 1) % t;
        int im = (i + t - 1) % t;
        rhs[static_cast<std::size_t>(i)] =
            c[static_cast<std::size_t>(i)] *
            (c[static_cast<std::size_t>(ip)] - c[static_cast<std::size_t>(im)]);
    }
    return rhs;
}

std::vector<double> higher_rhs(const PeriodicOperator& op, int k) {
    int t = op.period();
    if (k < 1 || k > op.gaps()) raise(Errc::out_of_range, "flow index k = " + std::to_string(k));
    Gradient g = grad_j(op, k);
    std::vector<double> rhs(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        int ip = (i + 1) % t;
        int im = (i + t - 1) % t;
        rhs[static_cast<std::size_t>(i)] =
            op.c(i) * (op.c(ip) * g[static_cast<std::size_t>(ip)] -
                       op.c(im) * g[static_cast<std::size_t>(im)]);
    }
    return rhs;
}

std::vector<double> higher_rhs_cubic_route(const PeriodicOperator& op, int k) {
    int t = op.period();
    if (k < 1 || k > op.gaps()) raise(Errc::out_of_range, "flow index k = " + std::to_string(k));
    Gradient g = grad_j(op, k - 1);
    std::vector<double> rhs(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        Gradient e(static_cast<std::size_t>(t), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        rhs[static_cast<std::size_t>(i)] = bracket_eval(BracketKind::cubic, e, g, op.weights());
    }
    return rhs;
}

std::vector<double> rk4_map(const std::function<std::vector<double>(const std::vector<double>&)>& field,
                            std::vector<double> c, double span, int nsteps) {
    int t = static_cast<int>(c.size());
    double h = span / nsteps;
    std::vector<double> k1, k2, k3, k4, tmp(c.size());
    for (int s = 0; s < nsteps; ++s) {
        k1 = field(c);
        for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
        k2 = field(tmp);
        for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
        k3 = field(tmp);
        for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
        k4 = field(tmp);
        for (int i = 0; i < t; ++i)
            c[static_cast<std::size_t>(i)] +=
                h / 6.0 *
                (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                 2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
    }
    return c;
}

namespace {

std::function<std::vector<double>(const std::vector<double>&)> flow_field(int k) {
    if (k == 1) return [](const std::vector<double>& c) { return volterra_rhs(c); };
    return [k](const std::vector<double>& c) { return higher_rhs(PeriodicOperator(c), k); };
}

}  // namespace

Trajectory integrate(const PeriodicOperator& op, int k, double t_end, StepControl ctl) {
    if (!(t_end > 0.0)) raise(Errc::invalid_range, "t_end must be positive");
    if (k < 1 || k > op.gaps()) raise(Errc::out_of_range, "flow index k = " + std::to_string(k));
    auto field = flow_field(k);

    auto run = [&](long long nsteps, Trajectory* record) {
        std::vector<double> c = op.weights();
        double h = t_end / static_cast<double>(nsteps);
        long long stride = std::max<long long>(1, nsteps / std::max(ctl.output_samples, 1));
        if (record) {
            record->t.push_back(0.0);
            record->states.push_back(c);
        }
        int t = static_cast<int>(c.size());
        std::vector<double> k1, k2, k3, k4, tmp(c.size());
        for (long long s = 0; s < nsteps; ++s) {
            k1 = field(c);
            for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
            k2 = field(tmp);
            for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
            k3 = field(tmp);
            for (int i = 0; i < t; ++i) tmp[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
            k4 = field(tmp);
            for (int i = 0; i < t; ++i)
                c[static_cast<std::size_t>(i)] +=
                    h / 6.0 *
                    (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                     2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
            for (double v : c)
                if (!(v > 0.0) || !std::isfinite(v))
                    raise(Errc::positivity_loss, "weight left (0, inf) at t = " +
                                                     std::to_string((s + 1) * h));
            if (record && ((s + 1) % stride == 0 || s + 1 == nsteps)) {
                record->t.push_back((s + 1) * h);
                record->states.push_back(c);
            }
        }
        return c;
    };

    long long nsteps = std::max<long long>(4, static_cast<long long>(std::ceil(t_end / ctl.initial_dt)));
    std::vector<double> prev = run(nsteps, nullptr);
    double err = 0.0;
    int halvings = 0;
    for (;; ++halvings) {
        if (halvings == ctl.max_halvings)
            raise(Errc::step_limit_exceeded, "endpoint not converged after " +
                                                 std::to_string(ctl.max_halvings) + " halvings");
        std::vector<double> next = run(2 * nsteps, nullptr);
        err = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            err = std::max(err, std::abs(next[i] - prev[i]) / std::max(1.0, std::abs(next[i])));
        nsteps *= 2;
        prev = std::move(next);
        if (err < ctl.endpoint_rel_tol) break;
    }

    Trajectory traj;
    traj.flow = k;
    run(nsteps, &traj);
    traj.steps = nsteps;
    traj.endpoint_error_estimate = err;
    return traj;
}

double commutativity_residual(const PeriodicOperator& op, int k, int l, double eps) {
    if (k == l) return 0.0;
    auto fk = flow_field(k);
    auto fl = flow_field(l);
    // One Euler step per flow map: the eps^2 term of the composition
    // difference is the Lie bracket of the fields and must cancel, leaving a
    // generic O(eps^3) remainder whose eps-halving ratio is ~8.  (Resolved
    // flow maps commute to integrator accuracy and show nothing.)
    auto euler = [](const std::function<std::vector<double>(const std::vector<double>&)>& f,
                    std::vector<double> c, double h) {
        std::vector<double> d = f(c);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += h * d[i];
        return c;
    };
    std::vector<double> ab = euler(fl, euler(fk, op.weights(), eps), eps);
    std::vector<double> ba = euler(fk, euler(fl, op.weights(), eps), eps);
    double r = 0.0;
    for (std::size_t i = 0; i < ab.size(); ++i) r = std::max(r, std::abs(ab[i] - ba[i]));
    return r;
}

ConservationReport conservation_report(const Trajectory& traj) {
    ConservationReport rep;
    if (traj.states.empty()) return rep;
    PeriodicOperator first(traj.states.front());
    DeltaPolynomial delta0 = delta_combinatorial(first);
    InvariantSet inv0 = invariant_set(first);
    DivisorData div0 = dirichlet_spectrum(first);
    double probe = 2.0 * lax_spectral_radius(first);
    double delta_at_probe0 = delta0.poly()(probe);

    rep.i_drift.assign(delta0.I.size(), 0.0);
    rep.j_drift.assign(inv0.J.size(), 0.0);
    rep.dirichlet_drift.assign(div0.lambda.size(), 0.0);

    for (const auto& c : traj.states) {
        PeriodicOperator op(c);
        DeltaPolynomial delta = delta_combinatorial(op);
        InvariantSet inv = invariant_set(op);
        DivisorData div = dirichlet_spectrum(op);
        for (std::size_t i = 0; i < delta.I.size(); ++i)
            rep.i_drift[i] = std::max(rep.i_drift[i], std::abs(delta.I[i] - delta0.I[i]) /
                                                          std::max(1.0, std::abs(delta0.I[i])));
        for (std::size_t i = 0; i < inv.J.size(); ++i)
            rep.j_drift[i] = std::max(rep.j_drift[i], std::abs(inv.J[i] - inv0.J[i]) /
                                                          std::max(1.0, std::abs(inv0.J[i])));
        for (std::size_t i = 0; i < div.lambda.size(); ++i)
            rep.dirichlet_drift[i] =
                std::max(rep.dirichlet_drift[i], std::abs(div.lambda[i] - div0.lambda[i]) /
                                                     std::max(1.0, std::abs(div0.lambda[i])));
        rep.delta_at_probe_drift =
            std::max(rep.delta_at_probe_drift, std::abs(delta.poly()(probe) - delta_at_probe0) /
                                                   std::max(1.0, std::abs(delta_at_probe0)));
    }
    return rep;
}

}  // namespace volterra
