#include "volterra/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace volterra {

namespace {

int cyc(int i, int t) {
    int r = i % t;
    return r < 0 ? r + t : r;
}

void check_lengths(const Gradient& gf, const Gradient& gg, const std::vector<double>& c) {
    if (gf.size() != c.size() || gg.size() != c.size())
        raise(Errc::length_mismatch, "gradient length does not match the weight vector");
}

}  // namespace

double bracket_eval(BracketKind kind, const Gradient& gf, const Gradient& gg,
                    const std::vector<double>& c) {
    check_lengths(gf, gg, c);
    int t = static_cast<int>(c.size());
    double acc = 0.0;
    for (int i = 0; i < t; ++i) {
        int i1 = cyc(i + 1, t);
        double wedge1 = gf[i] * gg[i1] - gf[i1] * gg[i];
        if (kind == BracketKind::quadratic) {
            acc += c[i] * c[i1] * wedge1;
        } else {
            int i2 = cyc(i + 2, t);
            double wedge2 = gf[i] * gg[i2] - gf[i2] * gg[i];
            acc += c[i] * c[i1] * (c[i] + c[i1]) * wedge1;
            acc += c[i] * c[i1] * c[i2] * wedge2;
        }
    }
    return acc;
}

double bracket_abs_scale(BracketKind kind, const Gradient& gf, const Gradient& gg,
                         const std::vector<double>& c) {
    check_lengths(gf, gg, c);
    int t = static_cast<int>(c.size());
    double acc = 0.0;
    for (int i = 0; i < t; ++i) {
        int i1 = cyc(i + 1, t);
        double wedge1 = std::abs(gf[i] * gg[i1]) + std::abs(gf[i1] * gg[i]);
        if (kind == BracketKind::quadratic) {
            acc += std::abs(c[i] * c[i1]) * wedge1;
        } else {
            int i2 = cyc(i + 2, t);
            double wedge2 = std::abs(gf[i] * gg[i2]) + std::abs(gf[i2] * gg[i]);
            acc += std::abs(c[i] * c[i1] * (c[i] + c[i1])) * wedge1;
            acc += std::abs(c[i] * c[i1] * c[i2]) * wedge2;
        }
    }
    return acc;
}

double structure_constant(BracketKind kind, int i, int j, const std::vector<double>& c,
                          Gradient* grad) {
    int t = static_cast<int>(c.size());
    i = cyc(i, t);
    j = cyc(j, t);
    if (grad) grad->assign(c.size(), 0.0);
    double val = 0.0;

    auto add2 = [&](int u, int v, double sign) {  // sign * c_u c_v
        val += sign * c[u] * c[v];
        if (grad) {
            (*grad)[u] += sign * c[v];
            (*grad)[v] += sign * c[u];
        }
    };
    auto add_pair_cubic = [&](int u, int v, double sign) {  // sign * c_u c_v (c_u + c_v)
        double s = c[u] + c[v];
        val += sign * c[u] * c[v] * s;
        if (grad) {
            (*grad)[u] += sign * (c[v] * s + c[u] * c[v]);
            (*grad)[v] += sign * (c[u] * s + c[u] * c[v]);
        }
    };
    auto add3 = [&](int u, int v, int w, double sign) {  // sign * c_u c_v c_w
        val += sign * c[u] * c[v] * c[w];
        if (grad) {
            (*grad)[u] += sign * c[v] * c[w];
            (*grad)[v] += sign * c[u] * c[w];
            (*grad)[w] += sign * c[u] * c[v];
        }
    };

    if (kind == BracketKind::quadratic) {
        if (j == cyc(i + 1, t)) add2(i, j, 1.0);
        if (i == cyc(j + 1, t)) add2(i, j, -1.0);
    } else {
        if (j == cyc(i + 1, t)) add_pair_cubic(i, j, 1.0);
        if (i == cyc(j + 1, t)) add_pair_cubic(i, j, -1.0);
        if (j == cyc(i + 2, t)) add3(i, cyc(i + 1, t), cyc(i + 2, t), 1.0);
        if (j == cyc(i - 2, t)) add3(i, cyc(i - 1, t), cyc(i - 2, t), -1.0);
    }
    return val;
}

// --- gradients -----------------------------------------------------------------

Gradient grad_i(const PeriodicOperator& op, int i) {
    int t = op.period(), n = op.gaps();
    if (i < 0 || i > n) raise(Errc::out_of_range, "i = " + std::to_string(i));
    double i0 = delta_combinatorial(op).I[0];

    Gradient g(static_cast<std::size_t>(t), 0.0);
    if (i == 0) {
        for (int j = 0; j < t; ++j) g[static_cast<std::size_t>(j)] = -i0 / (2.0 * op.c(j));
        return g;
    }
    double sum = 0.0;
    std::vector<double> dsum(static_cast<std::size_t>(t), 0.0);
    for (const auto& subset : enumerate_totally_disconnected(t, i)) {
        double prod = 1.0;
        for (int j : subset) prod *= op.c(j);
        sum += prod;
        for (int j : subset) dsum[static_cast<std::size_t>(j)] += prod / op.c(j);
    }
    for (int j = 0; j < t; ++j)
        g[static_cast<std::size_t>(j)] = i0 * (dsum[static_cast<std::size_t>(j)] - sum / (2.0 * op.c(j)));
    return g;
}

Gradient grad_j(const PeriodicOperator& op, int k) {
    int t = op.period(), n = op.gaps();
    if (k < 0 || k > n) raise(Errc::out_of_range, "k = " + std::to_string(k));
    Gradient g(static_cast<std::size_t>(t), 0.0);
    if (k == 0) {
        for (int i = 0; i < t; ++i) g[static_cast<std::size_t>(i)] = 1.0 / (2.0 * op.c(i));
        return g;
    }
    Matrix l = lax_matrix(op);
    Matrix p = l;
    for (int e = 1; e < 2 * k - 1; ++e) p = matmul(p, l);  // L^{2k-1}
    for (int i = 0; i < t; ++i) {
        int row = cyc(i - 1, t);
        g[static_cast<std::size_t>(i)] = p(row, i) / op.a(i);
    }
    return g;
}

Gradient grad_dirichlet(const PeriodicOperator& op, int k, const ToleranceConfig& tol) {
    int t = op.period(), n = op.gaps();
    if (k < 0 || k >= n) raise(Errc::out_of_range, "k = " + std::to_string(k));
    dirichlet_spectrum(op, tol);  // degeneracy guard
    SymmetricEigen eig = dirichlet_eigen(op);
    int col = n + k;  // positive half, ascending
    Gradient g(static_cast<std::size_t>(t), 0.0);
    for (int i = 2; i < t; ++i) {
        double vi = eig.vectors(i - 2, col);
        double vj = eig.vectors(i - 1, col);
        g[static_cast<std::size_t>(i)] = vi * vj / op.a(i);
    }
    return g;
}

namespace {

using LD = long double;

struct PChart {
    std::vector<LD> p;
    std::vector<int> sheet;
};

// Divisor momenta without the cross-validation overhead: eigenvalues of the
// Dirichlet matrix, multiplier from the numeric monodromy entry m22.  The
// whole pipeline runs in long double: near a narrow gap d ln rho / d lambda
// is large and eigenvalue noise would otherwise dominate the finite
// differences taken on top of this chart.
PChart p_chart_light(const PeriodicOperator& op, int mexp, const ToleranceConfig& tol) {
    int t = op.period(), n = op.gaps();
    int m = t - 1;
    std::vector<LD> b(static_cast<std::size_t>(m) * m, 0.0L);
    for (int j = 0; j + 1 < m; ++j) {
        LD v = std::sqrt(static_cast<LD>(op.c(j + 2)));
        b[static_cast<std::size_t>(j) * m + j + 1] = v;
        b[static_cast<std::size_t>(j + 1) * m + j] = v;
    }
    std::vector<LD> values = jacobi_values(std::move(b), m);
    LD scale = std::max(1.0L, std::max(std::abs(values.front()), std::abs(values.back())));
    for (int i = 0; i + 1 < m; ++i)
        if (values[static_cast<std::size_t>(i + 1)] - values[static_cast<std::size_t>(i)] <
            static_cast<LD>(tol.sep_tol) * scale)
            raise(Errc::degenerate_spectrum, "Dirichlet spectrum degenerated under perturbation");

    PChart out;
    out.p.resize(static_cast<std::size_t>(n));
    out.sheet.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        LD lam = values[static_cast<std::size_t>(n + k)];
        // Newton-polish on m12(lambda) = 0: near a narrow gap the multiplier
        // reacts as 1/y to eigenvalue error, so the eigensolver's jitter must
        // not be the limiting factor.
        for (int it = 0; it < 3; ++it) {
            LD f = monodromy_at(op, lam).m12;
            LD h = 1e-7L * (1.0L + std::abs(lam));
            LD df = (monodromy_at(op, lam + h).m12 - monodromy_at(op, lam - h).m12) / (2.0L * h);
            if (df == 0.0L) break;
            LD corr = f / df;
            if (std::abs(corr) > 1e-3L) break;  // polishing only
            lam -= corr;
        }
        LD rho = monodromy_at(op, lam).m22;
        if (std::abs(std::abs(rho) - 1.0L) < static_cast<LD>(tol.sep_tol))
            raise(Errc::branch_ambiguity, "divisor point at a branch point");
        LD denom = lam;
        for (int e = 1; e < mexp; ++e) denom *= lam;
        out.p[static_cast<std::size_t>(k)] = 2.0L * std::log(std::abs(rho)) / denom;
        out.sheet[static_cast<std::size_t>(k)] = std::abs(rho) > 1.0L ? 1 : -1;
    }
    return out;
}

}  // namespace

std::vector<Gradient> grad_p_all(const PeriodicOperator& op, BracketKind kind,
                                 const ToleranceConfig& tol) {
    int t = op.period(), n = op.gaps();
    int mexp = momentum_exponent(kind);
    PChart base = p_chart_light(op, mexp, tol);

    std::vector<Gradient> grads(static_cast<std::size_t>(n),
                                Gradient(static_cast<std::size_t>(t), 0.0));
    for (int i = 0; i < t; ++i) {
        double h = std::max(tol.fd_step, 3e-5) * std::max(1.0, op.c(i));
        bool done = false;
        for (int attempt = 0; attempt < 5 && !done; ++attempt, h *= 0.5) {
            PChart pp = p_chart_light(perturb(op, i, h), mexp, tol);
            PChart pm = p_chart_light(perturb(op, i, -h), mexp, tol);
            PChart pp2 = p_chart_light(perturb(op, i, h / 2.0), mexp, tol);
            PChart pm2 = p_chart_light(perturb(op, i, -h / 2.0), mexp, tol);
            if (pp.sheet != base.sheet || pm.sheet != base.sheet || pp2.sheet != base.sheet ||
                pm2.sheet != base.sheet)
                continue;  // sheet flipped: halve and retry
            for (int k = 0; k < n; ++k) {
                std::size_t kk = static_cast<std::size_t>(k);
                LD d1 = (pp.p[kk] - pm.p[kk]) / (2.0L * static_cast<LD>(h));
                LD d2 = (pp2.p[kk] - pm2.p[kk]) / static_cast<LD>(h);
                grads[kk][static_cast<std::size_t>(i)] =
                    static_cast<double>((4.0L * d2 - d1) / 3.0L);
            }
            done = true;
        }
        if (!done) raise(Errc::sheet_flip, "sheet tracking failed after 5 step halvings");
    }
    return grads;
}

Gradient grad_p(const PeriodicOperator& op, int k, BracketKind kind, const ToleranceConfig& tol) {
    if (k < 0 || k >= op.gaps()) raise(Errc::out_of_range, "k = " + std::to_string(k));
    return grad_p_all(op, kind, tol)[static_cast<std::size_t>(k)];
}

// --- canonical structures ----------------------------------------------------------

CanonicalChart canonical_chart(const PeriodicOperator& op, BracketKind kind,
                               const ToleranceConfig& tol) {
    DeltaPolynomial delta = delta_combinatorial(op);
    DivisorData div = resolve_divisor_sheets(op, delta, dirichlet_spectrum(op, tol), tol);
    int mexp = momentum_exponent(kind);
    CanonicalChart chart;
    chart.q = div.lambda;
    chart.sheet = div.sheet;
    chart.p.resize(div.lambda.size());
    for (std::size_t k = 0; k < div.lambda.size(); ++k) {
        double denom = div.lambda[k];
        for (int e = 1; e < mexp; ++e) denom *= div.lambda[k];
        chart.p[k] = 2.0 * std::log(std::abs(div.rho[k])) / denom;
    }
    return chart;
}

double verify_involution(const PeriodicOperator& op, BracketKind kind, const ToleranceConfig& tol) {
    int n = op.gaps();
    std::vector<Gradient> grads;
    grads.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grads.push_back(grad_dirichlet(op, k, tol));
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            worst = std::max(worst, std::abs(bracket_eval(kind, grads[static_cast<std::size_t>(a)],
                                                          grads[static_cast<std::size_t>(b)],
                                                          op.weights())));
    return worst;  // sign pairs scale by -1: same absolute values
}

CanonicalCheck verify_canonical(const PeriodicOperator& op, BracketKind kind,
                                const ToleranceConfig& tol) {
    int n = op.gaps();
    std::vector<Gradient> gq;
    for (int k = 0; k < n; ++k) gq.push_back(grad_dirichlet(op, k, tol));
    std::vector<Gradient> gp = grad_p_all(op, kind, tol);

    auto assemble = [&](CanonicalCheck& chk) {
        chk.qp = Matrix(n);
        chk.pp = Matrix(n);
        chk.max_qp_deviation = 0.0;
        chk.max_pp_deviation = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double qp = bracket_eval(kind, gq[static_cast<std::size_t>(a)],
                                         gp[static_cast<std::size_t>(b)], op.weights());
                double pp = bracket_eval(kind, gp[static_cast<std::size_t>(a)],
                                         gp[static_cast<std::size_t>(b)], op.weights());
                chk.qp(a, b) = qp;
                chk.pp(a, b) = pp;
                chk.max_qp_deviation =
                    std::max(chk.max_qp_deviation, std::abs(qp - (a == b ? 1.0 : 0.0)));
                chk.max_pp_deviation = std::max(chk.max_pp_deviation, std::abs(pp));
            }
    };

    CanonicalCheck chk;
    assemble(chk);

    // Thin margin without a sign flip means the finite differences are noise
    // limited (narrow gaps, extreme weights): redo them at a coarser step and
    // keep the better-converged estimate.
    if (chk.max_qp_deviation > 1e-6 && chk.max_qp_deviation <= 0.5) {
        ToleranceConfig coarse = tol;
        coarse.fd_step = 4.0 * std::max(tol.fd_step, 3e-5);
        std::vector<Gradient> gp_coarse = grad_p_all(op, kind, coarse);
        CanonicalCheck alt;
        std::swap(gp, gp_coarse);
        assemble(alt);
        if (alt.max_qp_deviation + alt.max_pp_deviation <
            chk.max_qp_deviation + chk.max_pp_deviation) {
            chk = alt;
        } else {
            std::swap(gp, gp_coarse);
        }
    }

    if (chk.max_qp_deviation > 0.5) {
        // lambda_k -> -lambda_k symmetry: a diagonal entry at -1 means the
        // opposite sheet carries the pole; p_k flips sign exactly.
        int flips = 0;
        for (int k = 0; k < n; ++k)
            if (chk.qp(k, k) < 0.0) {
                for (double& v : gp[static_cast<std::size_t>(k)]) v = -v;
                ++flips;
            }
        if (flips > 0) {
            assemble(chk);
            chk.sheet_flips = flips;
        }
        if (chk.max_qp_deviation > 0.5)
            raise(Errc::canonicity_failure, "no sheet assignment reproduces {q_i,p_j} = delta_ij");
    }
    return chk;
}

AnnulatorCheck verify_annulator(const PeriodicOperator& op) {
    int t = op.period(), n = op.gaps();
    Gradient g0 = grad_i(op, 0);
    Gradient gn = grad_i(op, n);
    AnnulatorCheck out;
    for (int i = 0; i < t; ++i) {
        Gradient e(static_cast<std::size_t>(t), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        double v1 = bracket_eval(BracketKind::quadratic, g0, e, op.weights());
        double s1 = std::max(1.0, bracket_abs_scale(BracketKind::quadratic, g0, e, op.weights()));
        double v2 = bracket_eval(BracketKind::cubic, gn, e, op.weights());
        double s2 = std::max(1.0, bracket_abs_scale(BracketKind::cubic, gn, e, op.weights()));
        out.quadratic_max_rel = std::max(out.quadratic_max_rel, std::abs(v1) / s1);
        out.cubic_max_rel = std::max(out.cubic_max_rel, std::abs(v2) / s2);
    }
    return out;
}

LenardMagriCheck lenard_magri_check(const PeriodicOperator& op, const Gradient& gf,
                                    const std::vector<double>& lambda_samples) {
    int n = op.gaps();
    LenardMagriCheck out;

    std::vector<Gradient> gi;
    for (int i = 0; i <= n; ++i) gi.push_back(grad_i(op, i));

    std::vector<double> b1(static_cast<std::size_t>(n) + 1), b2(static_cast<std::size_t>(n) + 1);
    std::vector<double> s1(static_cast<std::size_t>(n) + 1), s2(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        b1[static_cast<std::size_t>(i)] = bracket_eval(BracketKind::quadratic, gi[static_cast<std::size_t>(i)], gf, op.weights());
        b2[static_cast<std::size_t>(i)] = bracket_eval(BracketKind::cubic, gi[static_cast<std::size_t>(i)], gf, op.weights());
        s1[static_cast<std::size_t>(i)] = bracket_abs_scale(BracketKind::quadratic, gi[static_cast<std::size_t>(i)], gf, op.weights());
        s2[static_cast<std::size_t>(i)] = bracket_abs_scale(BracketKind::cubic, gi[static_cast<std::size_t>(i)], gf, op.weights());
    }

    // {I_0,f}_1 = 0,  {I_k,f}_2 = -{I_{k+1},f}_1,  {I_N,f}_2 = 0
    out.max_chain_rel = std::abs(b1[0]) / std::max(1.0, s1[0]);
    for (int k = 0; k < n; ++k) {
        double resid = b2[static_cast<std::size_t>(k)] + b1[static_cast<std::size_t>(k) + 1];
        double scale = std::max(1.0, s2[static_cast<std::size_t>(k)] + s1[static_cast<std::size_t>(k) + 1]);
        out.max_chain_rel = std::max(out.max_chain_rel, std::abs(resid) / scale);
    }
    out.max_chain_rel =
        std::max(out.max_chain_rel, std::abs(b2[static_cast<std::size_t>(n)]) / std::max(1.0, s2[static_cast<std::size_t>(n)]));

    // generating form: {Delta(lambda), f}_2 = lambda^2 {Delta(lambda), f}_1.
    for (double lam : lambda_samples) {
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        double sign = 1.0;
        for (int i = 0; i <= n; ++i) {
            double pw = 1.0;
            for (int e = 0; e < 2 * n + 1 - 2 * i; ++e) pw *= lam;
            lhs += sign * pw * b2[static_cast<std::size_t>(i)];
            rhs += sign * pw * lam * lam * b1[static_cast<std::size_t>(i)];
            scale += std::abs(pw) * (s2[static_cast<std::size_t>(i)] +
                                     lam * lam * s1[static_cast<std::size_t>(i)]);
            sign = -sign;
        }
        out.max_generating_rel =
            std::max(out.max_generating_rel, std::abs(lhs - rhs) / std::max(1.0, scale));
    }
    return out;
}

double jacobi_identity_max(const PeriodicOperator& op, BracketKind kind) {
    int t = op.period();
    const std::vector<double>& c = op.weights();

    // {F, c_l} for F with gradient gF:  sum_m gF_m {c_m, c_l}
    auto bracket_with_coord = [&](const Gradient& gf, int l, double& abs_scale) {
        double acc = 0.0;
        for (int m = 0; m < t; ++m) {
            double pi = structure_constant(kind, m, l, c);
            if (pi == 0.0) continue;
            acc += gf[static_cast<std::size_t>(m)] * pi;
            abs_scale += std::abs(gf[static_cast<std::size_t>(m)] * pi);
        }
        return acc;
    };

    double worst = 0.0;
    Gradient grad_ij;
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            for (int l = 0; l < t; ++l) {
                double scale = 0.0;
                structure_constant(kind, i, j, c, &grad_ij);
                double term1 = bracket_with_coord(grad_ij, l, scale);
                structure_constant(kind, j, l, c, &grad_ij);
                double term2 = bracket_with_coord(grad_ij, i, scale);
                structure_constant(kind, l, i, c, &grad_ij);
                double term3 = bracket_with_coord(grad_ij, j, scale);
                worst = std::max(worst, std::abs(term1 + term2 + term3) / std::max(1.0, scale));
            }
    return worst;
}

}  // namespace volterra
