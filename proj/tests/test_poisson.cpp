#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "volterra/poisson.hpp"

using namespace volterra;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

Gradient unit(int t, int i) {
    Gradient e(static_cast<std::size_t>(t), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    return e;
}

Gradient fd_oracle(const PeriodicOperator& op, double (*f)(const PeriodicOperator&, int), int arg,
                   double step) {
    Gradient g(static_cast<std::size_t>(op.period()));
    for (int i = 0; i < op.period(); ++i) {
        double h = step * std::max(1.0, op.c(i));
        double d1 = (f(perturb(op, i, h), arg) - f(perturb(op, i, -h), arg)) / (2.0 * h);
        double d2 = (f(perturb(op, i, h / 2.0), arg) - f(perturb(op, i, -h / 2.0), arg)) / h;
        g[static_cast<std::size_t>(i)] = (4.0 * d2 - d1) / 3.0;
    }
    return g;
}

double eval_i(const PeriodicOperator& op, int i) { return delta_combinatorial(op).I[static_cast<std::size_t>(i)]; }
double eval_j(const PeriodicOperator& op, int k) { return j_trace(op, k); }
double eval_lambda(const PeriodicOperator& op, int k) {
    return dirichlet_spectrum(op).lambda[static_cast<std::size_t>(k)];
}

double vec_rel(const Gradient& a, const Gradient& b) {
    double norm = 1.0, dev = 0.0;
    for (double v : a) norm = std::max(norm, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
    return dev / norm;
}

}  // namespace

TEST_CASE("structure constants") {
    PeriodicOperator op = random_operator(3, 3, 0.5, 2.0);
    int t = op.period();
    const auto& c = op.weights();

    for (int i = 0; i < t; ++i) {
        int j = (i + 1) % t;
        CHECK(bracket_eval(BracketKind::quadratic, unit(t, i), unit(t, j), c) ==
              doctest::Approx(c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)]));
        int j2 = (i + 2) % t;
        CHECK(bracket_eval(BracketKind::cubic, unit(t, i), unit(t, j2), c) ==
              doctest::Approx(c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>((i + 1) % t)] *
                              c[static_cast<std::size_t>(j2)]));
    }

    // antisymmetry is exact, and brackets act linearly on gradients
    std::mt19937_64 rng(4);
    auto rnd = [&]() {
        Gradient g(static_cast<std::size_t>(t));
        for (double& v : g) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        return g;
    };
    for (int trial = 0; trial < 20; ++trial) {
        Gradient gf = rnd(), gg = rnd(), gh = rnd();
        for (BracketKind kind : {BracketKind::quadratic, BracketKind::cubic}) {
            CHECK(bracket_eval(kind, gf, gg, c) == -bracket_eval(kind, gg, gf, c));
            Gradient mix(static_cast<std::size_t>(t));
            for (int i = 0; i < t; ++i)
                mix[static_cast<std::size_t>(i)] =
                    0.7 * gf[static_cast<std::size_t>(i)] + 1.3 * gh[static_cast<std::size_t>(i)];
            double lhs = bracket_eval(kind, mix, gg, c);
            double rhs = 0.7 * bracket_eval(kind, gf, gg, c) + 1.3 * bracket_eval(kind, gh, gg, c);
            CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, bracket_abs_scale(kind, mix, gg, c)));
        }
    }

    CHECK_THROWS_AS(bracket_eval(BracketKind::quadratic, Gradient(3, 1.0), Gradient(5, 1.0),
                                 op.weights()),
                    Error);
}

TEST_CASE("structure polynomial gradients match finite differences") {
    PeriodicOperator op = random_operator(2, 5, 0.5, 2.0);
    int t = op.period();
    for (BracketKind kind : {BracketKind::quadratic, BracketKind::cubic})
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) {
                Gradient g;
                structure_constant(kind, i, j, op.weights(), &g);
                for (int l = 0; l < t; ++l) {
                    double h = 1e-6;
                    std::vector<double> up = op.weights(), dn = op.weights();
                    up[static_cast<std::size_t>(l)] += h;
                    dn[static_cast<std::size_t>(l)] -= h;
                    double fd = (structure_constant(kind, i, j, up) -
                                 structure_constant(kind, i, j, dn)) /
                                (2.0 * h);
                    CHECK(std::abs(g[static_cast<std::size_t>(l)] - fd) < 1e-7);
                }
            }
}

TEST_CASE("discriminant coefficient gradients") {
    PeriodicOperator op = random_operator(1, 7, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);

    Gradient g0 = grad_i(op, 0);
    for (int j = 0; j < 3; ++j)
        CHECK(g0[static_cast<std::size_t>(j)] == doctest::Approx(-d.I[0] / (2.0 * op.c(j))));

    Gradient g1 = grad_i(op, 1);
    double sum_c = op.c(0) + op.c(1) + op.c(2);
    CHECK(g1[0] == doctest::Approx(d.I[0] * (1.0 - sum_c / (2.0 * op.c(0)))));

    PeriodicOperator op7 = random_operator(3, 9, 0.5, 2.0);
    for (int i = 0; i <= 3; ++i)
        CHECK(vec_rel(grad_i(op7, i), fd_oracle(op7, eval_i, i, 1e-6)) < 1e-7);
    CHECK_THROWS_AS(grad_i(op7, 4), Error);
}

TEST_CASE("trace invariant gradients") {
    PeriodicOperator op = random_operator(3, 11, 0.5, 2.0);
    Gradient g1 = grad_j(op, 1);
    for (double v : g1) CHECK(v == 1.0);

    Gradient g0 = grad_j(op, 0);
    for (int i = 0; i < op.period(); ++i)
        CHECK(g0[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / (2.0 * op.c(i))));

    for (int k : {2, 3})
        CHECK(vec_rel(grad_j(op, k), fd_oracle(op, eval_j, k, 1e-6)) < 1e-7);
    CHECK_THROWS_AS(grad_j(op, 4), Error);
}

TEST_CASE("Dirichlet eigenvalue gradients") {
    PeriodicOperator op3 = random_operator(1, 13, 0.5, 2.0);
    Gradient g = grad_dirichlet(op3, 0);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(g[2] == doctest::Approx(1.0 / (2.0 * op3.a(2))));

    PeriodicOperator op = random_operator(3, 17, 0.5, 2.0);
    for (int k = 0; k < 3; ++k)
        CHECK(vec_rel(grad_dirichlet(op, k), fd_oracle(op, eval_lambda, k, 1e-6)) < 1e-7);
    CHECK_THROWS_AS(grad_dirichlet(op, 3), Error);
}

TEST_CASE("momentum gradients") {
    PeriodicOperator op = random_operator(2, 19, 0.5, 2.0);

    // Richardson against a plain central difference at a larger step
    ToleranceConfig tol;
    Gradient g = grad_p(op, 0, BracketKind::quadratic, tol);
    auto p_val = [&](const PeriodicOperator& o) {
        DivisorData div = resolve_divisor_sheets(o, delta_combinatorial(o), dirichlet_spectrum(o));
        return 2.0 * std::log(std::abs(div.rho[0])) / div.lambda[0];
    };
    for (int i = 0; i < op.period(); ++i) {
        double h = 1e-4 * std::max(1.0, op.c(i));
        double fd = (p_val(perturb(op, i, h)) - p_val(perturb(op, i, -h))) / (2.0 * h);
        CHECK(rel(g[static_cast<std::size_t>(i)], fd) < 1e-6);
    }

    // chain consistency: d(2 ln rho_k) = lam^m dp + m lam^{m-1} p dlam
    DivisorData base = resolve_divisor_sheets(op, delta_combinatorial(op), dirichlet_spectrum(op));
    Gradient gl = grad_dirichlet(op, 0);
    double lam = base.lambda[0];
    double p = 2.0 * std::log(std::abs(base.rho[0])) / lam;
    auto lnr_val = [&](const PeriodicOperator& o) {
        DivisorData div = resolve_divisor_sheets(o, delta_combinatorial(o), dirichlet_spectrum(o));
        return 2.0 * std::log(std::abs(div.rho[0]));
    };
    for (int i = 0; i < op.period(); ++i) {
        double h = 1e-5 * std::max(1.0, op.c(i));
        double dlnr = (lnr_val(perturb(op, i, h)) - lnr_val(perturb(op, i, -h))) / (2.0 * h);
        double assembled = lam * g[static_cast<std::size_t>(i)] + p * gl[static_cast<std::size_t>(i)];
        CHECK(std::abs(dlnr - assembled) < 1e-5 * std::max(1.0, std::abs(dlnr)));
    }

    // near-constant lattice: finite entries (an exactly constant lattice puts
    // every divisor point on a branch point and must refuse)
    std::vector<double> near_ones(5, 1.0);
    for (int i = 0; i < 5; ++i) near_ones[static_cast<std::size_t>(i)] += 1e-3 * (i + 1);
    Gradient gnc = grad_p(PeriodicOperator(near_ones), 0, BracketKind::cubic, tol);
    for (double v : gnc) CHECK(std::isfinite(v));
    CHECK_THROWS_AS(grad_p(PeriodicOperator(std::vector<double>(5, 1.0)), 0, BracketKind::quadratic, tol),
                    Error);
}

TEST_CASE("involution of the Dirichlet eigenvalues") {
    PeriodicOperator op3 = random_operator(1, 23, 0.5, 2.0);
    CHECK(verify_involution(op3, BracketKind::quadratic) == 0.0);  // single q: antisymmetry

    PeriodicOperator op = random_operator(2, 29, 0.5, 2.0);
    double lam_max = dirichlet_spectrum(op).lambda.back();
    double scale = std::max(1.0, lam_max * lam_max * lam_max);
    CHECK(verify_involution(op, BracketKind::quadratic) < 1e-8 * scale);
    CHECK(verify_involution(op, BracketKind::cubic) < 1e-8 * scale);

    // sign pairs: gradients of -lambda_k are the negated gradients, so the
    // pair brackets match in absolute value by bilinearity
    Gradient ga = grad_dirichlet(op, 0), gb = grad_dirichlet(op, 1);
    Gradient nga = ga;
    for (double& v : nga) v = -v;
    CHECK(bracket_eval(BracketKind::quadratic, nga, gb, op.weights()) ==
          doctest::Approx(-bracket_eval(BracketKind::quadratic, ga, gb, op.weights())));
}

TEST_CASE("canonical conjugacy") {
    for (int seed : {31, 37}) {
        PeriodicOperator op = random_operator(2, seed, 0.5, 2.0);
        for (BracketKind kind : {BracketKind::quadratic, BracketKind::cubic}) {
            CanonicalCheck chk = verify_canonical(op, kind);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    CHECK(std::abs(chk.qp(a, b) - (a == b ? 1.0 : 0.0)) < 1e-5);
                    CHECK(std::abs(chk.pp(a, b)) < 1e-5);
                }
        }
    }

    // flipping a sheet negates the momentum and the diagonal entry with it
    PeriodicOperator op = random_operator(1, 41, 0.5, 2.0);
    Gradient gq = grad_dirichlet(op, 0);
    Gradient gp = grad_p(op, 0, BracketKind::quadratic);
    double qp = bracket_eval(BracketKind::quadratic, gq, gp, op.weights());
    CHECK(qp == doctest::Approx(1.0).epsilon(1e-6));
    for (double& v : gp) v = -v;
    CHECK(bracket_eval(BracketKind::quadratic, gq, gp, op.weights()) ==
          doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("canonical chart") {
    PeriodicOperator op = random_operator(3, 43, 0.5, 2.0);
    CanonicalChart chart = canonical_chart(op, BracketKind::cubic);
    REQUIRE(chart.q.size() == 3);
    for (std::size_t k = 0; k + 1 < chart.q.size(); ++k) CHECK(chart.q[k] < chart.q[k + 1]);
    CHECK(chart.q.front() > 0.0);
    for (double p : chart.p) CHECK(std::isfinite(p));
}

TEST_CASE("annulators") {
    PeriodicOperator op = random_operator(3, 47, 0.5, 2.0);
    AnnulatorCheck ann = verify_annulator(op);
    CHECK(ann.quadratic_max_rel < 1e-10);
    CHECK(ann.cubic_max_rel < 1e-10);

    // J_0 = -ln I_0 commutes with everything under the quadratic bracket
    std::mt19937_64 rng(48);
    Gradient gj0 = grad_j(op, 0);
    for (int trial = 0; trial < 5; ++trial) {
        Gradient gf(static_cast<std::size_t>(op.period()));
        for (double& v : gf) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        double val = bracket_eval(BracketKind::quadratic, gj0, gf, op.weights());
        double scale = std::max(1.0, bracket_abs_scale(BracketKind::quadratic, gj0, gf, op.weights()));
        CHECK(std::abs(val) < 1e-12 * scale);
    }
}

TEST_CASE("recursion chain between the two brackets") {
    // T=3, f = c_0, k = 0 by direct evaluation of both sides
    PeriodicOperator op3 = random_operator(1, 53, 0.5, 2.0);
    Gradient gi0 = grad_i(op3, 0), gi1 = grad_i(op3, 1);
    Gradient e0 = unit(3, 0);
    double lhs = bracket_eval(BracketKind::cubic, gi0, e0, op3.weights());
    double rhs = -bracket_eval(BracketKind::quadratic, gi1, e0, op3.weights());
    CHECK(lhs == doctest::Approx(rhs));

    PeriodicOperator op = random_operator(3, 59, 0.5, 2.0);
    std::mt19937_64 rng(60);
    std::vector<double> lams{1.7, 2.4, 3.1, 4.8, 6.5};
    for (int trial = 0; trial < 10; ++trial) {
        Gradient gf(static_cast<std::size_t>(op.period()));
        for (double& v : gf) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        LenardMagriCheck lm = lenard_magri_check(op, gf, lams);
        CHECK(lm.max_chain_rel < 1e-9);
        CHECK(lm.max_generating_rel < 1e-9);
    }

    // endpoint: I_N generates the cubic annulator
    Gradient gin = grad_i(op, 3);
    for (int i = 0; i < op.period(); ++i) {
        double val = bracket_eval(BracketKind::cubic, gin, unit(op.period(), i), op.weights());
        double scale = std::max(1.0, bracket_abs_scale(BracketKind::cubic, gin,
                                                       unit(op.period(), i), op.weights()));
        CHECK(std::abs(val) < 1e-12 * scale);
    }
}

TEST_CASE("Jacobi identity by brute force") {
    for (int n : {1, 2, 3, 4}) {
        PeriodicOperator op = random_operator(n, 61 + n, 0.5, 2.0);
        CHECK(jacobi_identity_max(op, BracketKind::quadratic) < 1e-12);
        CHECK(jacobi_identity_max(op, BracketKind::cubic) < 1e-12);
    }
}
