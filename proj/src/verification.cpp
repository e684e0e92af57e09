#include "volterra/verification.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>

#include "volterra/flows.hpp"
#include "volterra/invariants.hpp"
#include "volterra/poisson.hpp"
#include "volterra/spectral.hpp"

namespace volterra {

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1e-30, std::abs(b)); }

// max over matched sorted pairs; both lists must have equal length
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    auto key = [](const Complex& u, const Complex& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<Complex> to_complex(const std::vector<double>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
    return out;
}

Gradient fd_gradient(const PeriodicOperator& op, const std::function<double(const PeriodicOperator&)>& f,
                     double step) {
    Gradient g(static_cast<std::size_t>(op.period()));
    for (int i = 0; i < op.period(); ++i) {
        double h = step * std::max(1.0, op.c(i));
        double d1 = (f(perturb(op, i, h)) - f(perturb(op, i, -h))) / (2.0 * h);
        double d2 = (f(perturb(op, i, h / 2.0)) - f(perturb(op, i, -h / 2.0))) / h;
        g[static_cast<std::size_t>(i)] = (4.0 * d2 - d1) / 3.0;
    }
    return g;
}

int cyclic_distance(int i, int j, int t) {
    int d = std::abs(i - j) % t;
    return std::min(d, t - d);
}

struct Collector {
    std::vector<CheckReport> reports;
    double scale = 1.0;
    void add(std::string name, double residual, double tolerance) {
        reports.push_back(make_check(std::move(name), residual, tolerance * scale));
    }
};

// --- spectral suite ---------------------------------------------------------------

void spectral_checks(const PeriodicOperator& op, const ToleranceConfig& tol, std::uint64_t seed,
                     Collector& col) {
    int n = op.gaps();
    DeltaPolynomial dm = delta_from_monodromy(op, tol);
    DeltaPolynomial dc = delta_combinatorial(op);

    double two_route = 0.0;
    for (int i = 0; i <= n; ++i)
        two_route = std::max(two_route, rel_diff(dm.I[static_cast<std::size_t>(i)],
                                                 dc.I[static_cast<std::size_t>(i)]));
    col.add("spectral.delta_two_route", two_route, 1e-10);
    col.add("spectral.i_n_closed_form",
            rel_diff(i_n_closed_form(op), dc.I[static_cast<std::size_t>(n)]), 1e-10);

    MonodromyMatrix mono = monodromy(op);
    Poly det = mono.m.det();
    // roundoff yardstick: the same convolutions with absolute coefficients
    double det_scale = 1.0;
    {
        auto abs_poly = [](const Poly& p) {
            std::vector<double> c(p.coeffs());
            for (double& v : c) v = std::abs(v);
            return Poly(std::move(c));
        };
        Poly acc = abs_poly(mono.m.m11) * abs_poly(mono.m.m22) +
                   abs_poly(mono.m.m12) * abs_poly(mono.m.m21);
        det_scale = std::max(1.0, acc.max_abs_coeff());
    }
    double det_dev = std::abs(det.coeff(0) - 1.0);
    for (int k = 1; k <= det.degree(); ++k) det_dev = std::max(det_dev, std::abs(det.coeff(k)));
    col.add("spectral.monodromy_det", det_dev / det_scale, tol.eq_tol);

    const Poly& tr = mono.trace_poly();
    double parity = 0.0;
    for (int e = 0; e <= 2 * n; e += 2) parity = std::max(parity, std::abs(tr.coeff(e)));
    col.add("spectral.delta_parity", parity / std::max(1.0, tr.max_abs_coeff()), tol.eq_tol);

    // Lax eigenvalues against the branch point families
    Matrix lax = lax_matrix(op);
    SymmetricEigen lax_eig = jacobi_eigen(lax);
    double radius = std::max(std::abs(lax_eig.values.front()), std::abs(lax_eig.values.back()));
    SpectralCurve curve = spectral_curve(dc, tol);
    col.add("spectral.lax_delta_roots",
            multiset_distance(to_complex(lax_eig.values), curve.branch_plus) / radius, 1e-8);

    Matrix lax_anti = lax;  // antiperiodic twist: negate both corners
    lax_anti(0, op.period() - 1) = -lax_anti(0, op.period() - 1);
    lax_anti(op.period() - 1, 0) = -lax_anti(op.period() - 1, 0);
    SymmetricEigen anti_eig = jacobi_eigen(lax_anti);
    col.add("spectral.lax_antiperiodic_roots",
            multiset_distance(to_complex(anti_eig.values), curve.branch_minus) / radius, 1e-8);

    std::vector<Complex> negated;
    for (const auto& z : curve.branch_minus) negated.push_back(-z);
    col.add("spectral.branch_sigma_symmetry",
            multiset_distance(curve.branch_plus, negated) / radius, 1e-8);
    col.add("spectral.branch_count",
            std::abs(static_cast<double>(curve.branch_plus.size() + curve.branch_minus.size()) -
                     (4.0 * n + 2.0)),
            0.5);

    DivisorData div = dirichlet_spectrum(op, tol);
    SymmetricEigen dir = dirichlet_eigen(op);
    double sym = 0.0;
    int m = static_cast<int>(dir.values.size());
    double dscale = std::max(1.0, std::abs(dir.values.back()));
    for (int k = 0; k < m; ++k)
        sym = std::max(sym, std::abs(dir.values[static_cast<std::size_t>(k)] +
                                     dir.values[static_cast<std::size_t>(m - 1 - k)]));
    col.add("spectral.dirichlet_symmetry", sym / dscale, tol.eq_tol);

    // independent oracle: positive roots of the m12 entry of the monodromy
    std::vector<Complex> m12_roots = poly_roots(mono.m.m12);
    std::vector<Complex> m12_pos;
    for (const auto& z : m12_roots)
        if (z.real() > 0.0) m12_pos.push_back(z);
    col.add("spectral.dirichlet_m12_roots",
            multiset_distance(to_complex(div.lambda), m12_pos) / dscale, 1e-8);

    // rho_+ rho_- = 1 at a few regular points
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    double reciprocity = 0.0;
    for (int s = 0; s < 5; ++s) {
        double re = radius * (1.2 + 1.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
        double im = 0.3 * radius * (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5);
        Complex lam(re, im);
        Complex prod = floquet_rho(dc, lam, +1, tol) * floquet_rho(dc, lam, -1, tol);
        reciprocity = std::max(reciprocity, std::abs(prod - 1.0));
    }
    col.add("spectral.floquet_reciprocity", reciprocity, 1e-12);

    if (curve.nonsingular) {
        double quasi = 0.0;
        for (int s = 0; s < 3; ++s) {
            double lam = radius * (1.25 + 0.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
            // The decaying sheet is forward-recursion unstable: the growing
            // mode amplifies injected roundoff by |rho_+|^2 over two periods.
            // Exercise it only where that amplification stays under budget.
            double rho_plus = std::abs(floquet_rho(dc, Complex(lam, 0.0), +1, tol));
            int sheet = (s % 2 == 1 && rho_plus < 1e3) ? -1 : 1;
            std::vector<Complex> psi = bloch_function(op, dc, Complex(lam, 0.0), sheet,
                                                      2 * op.period(), tol);
            Complex rho = floquet_rho(dc, Complex(lam, 0.0), sheet, tol);
            double peak = 0.0;
            for (const auto& v : psi) peak = std::max(peak, std::abs(v));
            for (int i = 0; i + op.period() < static_cast<int>(psi.size()); ++i)
                quasi = std::max(quasi, std::abs(psi[static_cast<std::size_t>(i + op.period())] -
                                                 rho * psi[static_cast<std::size_t>(i)]) /
                                            peak);
        }
        col.add("spectral.bloch_quasiperiodicity", quasi, tol.eq_tol);
    }
}

// --- poisson suite -----------------------------------------------------------------

void poisson_checks(const PeriodicOperator& op, const ToleranceConfig& tol, std::uint64_t seed,
                    Collector& col) {
    int t = op.period(), n = op.gaps();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    // analytic gradients against the finite-difference oracle; agreement is
    // relative to the gradient's norm (entries may cancel individually)
    double fd_err = 0.0;
    auto vec_rel = [&](const Gradient& a, const Gradient& f) {
        double norm = 1.0, dev = 0.0;
        for (double v : a) norm = std::max(norm, std::abs(v));
        for (std::size_t s = 0; s < a.size(); ++s) dev = std::max(dev, std::abs(a[s] - f[s]));
        return dev / norm;
    };
    DeltaPolynomial dc = delta_combinatorial(op);
    for (int i = 0; i <= n; ++i) {
        Gradient a = grad_i(op, i);
        Gradient f = fd_gradient(op, [i](const PeriodicOperator& o) {
            return delta_combinatorial(o).I[static_cast<std::size_t>(i)]; }, tol.fd_step);
        fd_err = std::max(fd_err, vec_rel(a, f));
    }
    for (int k = 0; k <= n; ++k) {
        Gradient a = grad_j(op, k);
        Gradient f = fd_gradient(op, [k](const PeriodicOperator& o) { return j_trace(o, k); },
                                 tol.fd_step);
        fd_err = std::max(fd_err, vec_rel(a, f));
    }
    for (int k = 0; k < n; ++k) {
        Gradient a = grad_dirichlet(op, k, tol);
        Gradient f = fd_gradient(op, [k, &tol](const PeriodicOperator& o) {
            return dirichlet_spectrum(o, tol).lambda[static_cast<std::size_t>(k)]; }, tol.fd_step);
        fd_err = std::max(fd_err, vec_rel(a, f));
    }
    col.add("poisson.gradient_fd", fd_err, 1e-7);

    AnnulatorCheck ann = verify_annulator(op);
    col.add("poisson.annulators", std::max(ann.quadratic_max_rel, ann.cubic_max_rel), 1e-10);

    // Lenard-Magri chain and generating identity: coordinate and random gradients
    std::vector<double> lam_samples;
    double radius = lax_spectral_radius(op);
    for (int s = 0; s < 5; ++s) lam_samples.push_back(radius * uniform(1.1, 2.5));
    double chain = 0.0, generating = 0.0;
    for (int trial = 0; trial < 10 + t; ++trial) {
        Gradient gf(static_cast<std::size_t>(t), 0.0);
        if (trial < t) {
            gf[static_cast<std::size_t>(trial)] = 1.0;
        } else {
            for (double& v : gf) v = uniform(-1.0, 1.0);
        }
        LenardMagriCheck lm = lenard_magri_check(op, gf, lam_samples);
        chain = std::max(chain, lm.max_chain_rel);
        generating = std::max(generating, lm.max_generating_rel);
    }
    col.add("poisson.lenard_magri_chain", chain, 1e-9);
    col.add("poisson.lenard_magri_generating", generating, 1e-9);

    if (t <= 9) {
        col.add("poisson.jacobi_identity_quadratic",
                jacobi_identity_max(op, BracketKind::quadratic), 1e-12);
        col.add("poisson.jacobi_identity_cubic", jacobi_identity_max(op, BracketKind::cubic),
                1e-12);
    }

    // involution and canonicity need the divisor machinery
    SpectralCurve curve = spectral_curve(dc, tol);
    if (!curve.nonsingular)
        raise(Errc::singular_curve, "symplectic checks require a nonsingular spectral curve");

    DivisorData div = dirichlet_spectrum(op, tol);
    double lam_max = div.lambda.back();
    double inv_scale = std::max(1.0, lam_max * lam_max * lam_max);
    col.add("poisson.involution_quadratic",
            verify_involution(op, BracketKind::quadratic, tol) / inv_scale, 1e-7);
    col.add("poisson.involution_cubic", verify_involution(op, BracketKind::cubic, tol) / inv_scale,
            1e-7);

    CanonicalCheck cq = verify_canonical(op, BracketKind::quadratic, tol);
    col.add("poisson.canonical_quadratic", std::max(cq.max_qp_deviation, cq.max_pp_deviation),
            1e-5);
    CanonicalCheck cc = verify_canonical(op, BracketKind::cubic, tol);
    col.add("poisson.canonical_cubic", std::max(cc.max_qp_deviation, cc.max_pp_deviation), 1e-5);
}

// --- flows suite --------------------------------------------------------------------

void flows_checks(const PeriodicOperator& op, const ToleranceConfig& tol, std::uint64_t seed,
                  Collector& col) {
    (void)seed;
    (void)tol;
    int t = op.period(), n = op.gaps();

    std::vector<double> v = volterra_rhs(op.weights());
    std::vector<double> h1 = higher_rhs(op, 1);
    double k1_dev = 0.0;
    for (int i = 0; i < t; ++i)
        k1_dev = std::max(k1_dev, std::abs(v[static_cast<std::size_t>(i)] - h1[static_cast<std::size_t>(i)]));
    col.add("flows.k1_is_volterra", k1_dev, 0.0);

    // locality radius exactly k: zero sensitivity beyond, nonzero at distance k
    double locality = 0.0;
    for (int k = 1; k <= n; ++k) {
        std::vector<double> base = higher_rhs(op, k);
        for (int j = 0; j < t; ++j) {
            std::vector<double> pert = higher_rhs(perturb(op, j, 0.37 * op.c(j)), k);
            bool seen_at_k = false;
            for (int i = 0; i < t; ++i) {
                int d = cyclic_distance(i, j, t);
                double diff = std::abs(pert[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]);
                if (d > k) locality = std::max(locality, diff);
                if (d == k && diff != 0.0) seen_at_k = true;
            }
            if (!seen_at_k) locality = std::max(locality, 1.0);  // radius fell short of k
        }
    }
    col.add("flows.locality", locality, 0.0);

    double bi = 0.0;
    for (int k = 1; k <= n; ++k) {
        std::vector<double> r1 = higher_rhs(op, k);
        std::vector<double> r2 = higher_rhs_cubic_route(op, k);
        double scale = 0.0;
        for (double x : r1) scale = std::max(scale, std::abs(x));
        for (int i = 0; i < t; ++i)
            bi = std::max(bi, std::abs(r1[static_cast<std::size_t>(i)] - r2[static_cast<std::size_t>(i)]) /
                                  std::max(1.0, scale));
    }
    col.add("flows.bihamiltonian_routes", bi, 1e-9);

    double div_resid = 0.0;
    for (int k = 1; k <= n; ++k) {
        std::vector<double> r = higher_rhs(op, k);
        double s = 0.0, scale = 0.0;
        for (int i = 0; i < t; ++i) {
            s += r[static_cast<std::size_t>(i)] / op.c(i);
            scale += std::abs(r[static_cast<std::size_t>(i)] / op.c(i));
        }
        div_resid = std::max(div_resid, std::abs(s) / std::max(1.0, scale));
    }
    col.add("flows.divergence_j0", div_resid, 1e-12);

    Trajectory traj = integrate(op, 1, 10.0);
    ConservationReport rep = conservation_report(traj);
    double drift = rep.delta_at_probe_drift;
    for (double d : rep.i_drift) drift = std::max(drift, d);
    for (double d : rep.j_drift) drift = std::max(drift, d);
    col.add("flows.conservation_drift", drift, 1e-7);

    // time reversal: integrate forward, then the negated field back to zero
    {
        auto fwd = [](const std::vector<double>& c) { return volterra_rhs(c); };
        auto bwd = [](const std::vector<double>& c) {
            std::vector<double> r = volterra_rhs(c);
            for (double& x : r) x = -x;
            return r;
        };
        std::vector<double> there = rk4_map(fwd, op.weights(), 1.0, 2000);
        std::vector<double> back = rk4_map(bwd, there, 1.0, 2000);
        double dev = 0.0;
        for (int i = 0; i < t; ++i)
            dev = std::max(dev, std::abs(back[static_cast<std::size_t>(i)] - op.c(i)) /
                                    std::max(1.0, op.c(i)));
        col.add("flows.time_reversal", dev, 1e-7);
    }

    if (n >= 2) {
        double eps = 1e-3;
        double r1 = commutativity_residual(op, 1, 2, eps);
        double r2 = commutativity_residual(op, 1, 2, eps / 2.0);
        double ratio = (r2 > 0.0) ? r1 / r2 : 8.0;
        col.add("flows.commutativity_order", std::abs(std::log2(ratio) - 3.0), 1.0);

        // sharp form: the vector fields' Lie bracket vanishes
        double lie = 0.0;
        auto field = [&](int k, const std::vector<double>& c) {
            return k == 1 ? volterra_rhs(c) : higher_rhs(PeriodicOperator(c), k);
        };
        double tau = 1e-6;
        std::vector<double> x1 = field(1, op.weights());
        std::vector<double> x2 = field(2, op.weights());
        auto shift = [&](const std::vector<double>& dir, double s) {
            std::vector<double> c = op.weights();
            for (int i = 0; i < t; ++i) c[static_cast<std::size_t>(i)] += s * dir[static_cast<std::size_t>(i)];
            return c;
        };
        std::vector<double> d12p = field(1, shift(x2, tau)), d12m = field(1, shift(x2, -tau));
        std::vector<double> d21p = field(2, shift(x1, tau)), d21m = field(2, shift(x1, -tau));
        for (int i = 0; i < t; ++i) {
            double dx1 = (d12p[static_cast<std::size_t>(i)] - d12m[static_cast<std::size_t>(i)]) / (2.0 * tau);
            double dx2 = (d21p[static_cast<std::size_t>(i)] - d21m[static_cast<std::size_t>(i)]) / (2.0 * tau);
            lie = std::max(lie, std::abs(dx1 - dx2));
        }
        col.add("flows.lie_bracket", lie, 1e-6);
    }
}

// --- theorem suite -------------------------------------------------------------------

void theorem_checks(const PeriodicOperator& op, const ToleranceConfig& tol, std::uint64_t seed,
                    Collector& col) {
    (void)seed;
    int n = op.gaps();
    DeltaPolynomial dc = delta_combinatorial(op);
    InvariantSet inv = invariant_set(op);

    SeriesExpansion logd = expand_log_delta(dc, n);
    double logd_dev = rel_diff(logd.coeff(0), -inv.J[0]);
    for (int k = 1; k <= n; ++k)
        logd_dev = std::max(logd_dev, rel_diff(logd.coeff(k), -inv.J[static_cast<std::size_t>(k)]));
    col.add("theorem.log_delta_coefficients", logd_dev, 1e-9);

    double newton = 0.0;
    for (int k = 1; k <= n; ++k)
        newton = std::max(newton, rel_diff(j_from_i(dc, k), inv.J[static_cast<std::size_t>(k)]));
    col.add("theorem.newton_identities", newton, 1e-9);

    SeriesExpansion logr = expand_log_rho(op, dc, n, tol);
    double logr_dev = std::abs(logr.log_coefficient + (2.0 * n + 1.0));
    for (int k = 0; k <= n; ++k)
        logr_dev = std::max(logr_dev, rel_diff(logr.coeff(k), inv.J[static_cast<std::size_t>(k)]));

    // lambda^{2N+1} (ln rho + ln Delta) must decay under sample doubling
    double radius = lax_spectral_radius(op);
    auto tail = [&](double lam) {
        double dv = dc.poly()(lam);
        double half = dv / 2.0;
        double lnr = -std::log(half + std::sqrt(half * half - 1.0));
        return std::pow(lam, 2.0 * n + 1.0) * (lnr + std::log(dv));
    };
    double t1 = tail(2.0 * radius), t2 = tail(4.0 * radius);
    if (!(std::abs(t2) < 0.75 * std::abs(t1) || std::abs(t2) < 1e-12)) logr_dev = std::max(logr_dev, 1.0);
    col.add("theorem.log_rho_coefficients", logr_dev, 1e-6);

    ExpansionCheck aq = check_hamiltonian_expansion(op, BracketKind::quadratic, tol);
    col.add("theorem.hamiltonian_expansion_quadratic", aq.max_rel_error, 1e-6);
    ExpansionCheck ac = check_hamiltonian_expansion(op, BracketKind::cubic, tol);
    col.add("theorem.hamiltonian_expansion_cubic", ac.max_rel_error, 1e-6);

    std::vector<double> samples = default_lambda_samples(dc, 8);
    DifferentialCheck bq = check_differential_basis(dc, BracketKind::quadratic, samples, tol);
    col.add("theorem.differential_basis_quadratic", bq.max_rel_error, 1e-6);
    col.add("theorem.differential_rank_quadratic", bq.sample_condition, 1e8);
    DifferentialCheck bc = check_differential_basis(dc, BracketKind::cubic, samples, tol);
    col.add("theorem.differential_basis_cubic", bc.max_rel_error, 1e-6);
    col.add("theorem.differential_rank_cubic", bc.sample_condition, 1e8);
}

}  // namespace

Suite suite_from_name(const std::string& name) {
    if (name == "spectral") return Suite::spectral;
    if (name == "poisson") return Suite::poisson;
    if (name == "flows") return Suite::flows;
    if (name == "theorem") return Suite::theorem;
    if (name == "all") return Suite::all;
    raise(Errc::invalid_range, "unknown suite '" + name + "'");
}

std::vector<CheckReport> run_suite(const PeriodicOperator& op, Suite suite, std::uint64_t seed,
                                   double tolerance_scale, const ToleranceConfig& tol) {
    Collector col;
    col.scale = tolerance_scale;
    if (suite == Suite::spectral || suite == Suite::all) spectral_checks(op, tol, seed, col);
    if (suite == Suite::poisson || suite == Suite::all) poisson_checks(op, tol, seed, col);
    if (suite == Suite::flows || suite == Suite::all) flows_checks(op, tol, seed, col);
    if (suite == Suite::theorem || suite == Suite::all) theorem_checks(op, tol, seed, col);
    std::sort(col.reports.begin(), col.reports.end(),
              [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
    return col.reports;
}

}  // namespace volterra
