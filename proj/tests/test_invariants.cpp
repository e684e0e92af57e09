#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "volterra/invariants.hpp"

using namespace volterra;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }
}

TEST_CASE("Lax matrix") {
    PeriodicOperator ones({1.0, 1.0, 1.0});
    Matrix l = lax_matrix(ones);
    CHECK(trace(l) == 0.0);
    SymmetricEigen eig = jacobi_eigen(l);
    CHECK(eig.values[0] == doctest::Approx(-1.0));
    CHECK(eig.values[1] == doctest::Approx(-1.0));
    CHECK(eig.values[2] == doctest::Approx(2.0));

    // eigenvalues are the roots of Delta - 2
    PeriodicOperator op = random_operator(3, 7, 0.5, 2.0);
    Matrix l7 = lax_matrix(op);
    CHECK(trace(l7) == 0.0);
    int nz = 0;
    for (double v : l7.v)
        if (v != 0.0) ++nz;
    CHECK(nz == 2 * op.period());

    SymmetricEigen e7 = jacobi_eigen(l7);
    Poly plus = delta_combinatorial(op).poly();
    plus += Poly::constant(-2.0);
    auto roots = poly_roots(plus);
    REQUIRE(roots.size() == e7.values.size());
    for (std::size_t k = 0; k < roots.size(); ++k) {
        CHECK(std::abs(roots[k].imag()) < 1e-8);
        CHECK(std::abs(roots[k].real() - e7.values[k]) < 1e-8);
    }
}

TEST_CASE("trace invariants") {
    PeriodicOperator ones({1.0, 1.0, 1.0});
    CHECK(j_trace(ones, 1) == doctest::Approx(3.0));
    CHECK(j_trace(ones, 0) == doctest::Approx(0.0));

    PeriodicOperator op = random_operator(2, 11, 0.5, 2.0);
    double sum_c = 0.0;
    for (int i = 0; i < op.period(); ++i) sum_c += op.c(i);
    CHECK(j_trace(op, 1) == doctest::Approx(sum_c));

    // T=5: J_2 = (I_1/I_0)^2 / 2 - I_2/I_0
    DeltaPolynomial d = delta_combinatorial(op);
    double r1 = d.I[1] / d.I[0], r2 = d.I[2] / d.I[0];
    CHECK(rel(j_trace(op, 2), 0.5 * r1 * r1 - r2) < 1e-12);

    CHECK_THROWS_AS(j_trace(op, 3), Error);
    CHECK_THROWS_AS(j_trace(op, -1), Error);

    InvariantSet inv = invariant_set(op);
    REQUIRE(inv.J.size() == 3);
    for (int k = 0; k <= 2; ++k) CHECK(inv.J[static_cast<std::size_t>(k)] == doctest::Approx(j_trace(op, k)));
}

TEST_CASE("Newton identity route") {
    PeriodicOperator op = random_operator(2, 13, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    CHECK(rel(j_from_i(d, 1), d.I[1] / d.I[0]) < 1e-14);
    double r1 = d.I[1] / d.I[0], r2 = d.I[2] / d.I[0];
    CHECK(rel(j_from_i(d, 2), 0.5 * r1 * r1 - r2) < 1e-13);

    PeriodicOperator op9 = random_operator(4, 19, 0.5, 2.0);
    DeltaPolynomial d9 = delta_combinatorial(op9);
    for (int k = 1; k <= 4; ++k) CHECK(rel(j_from_i(d9, k), j_trace(op9, k)) < 1e-9);

    CHECK_THROWS_AS(j_from_i(d, 0), Error);
    CHECK_THROWS_AS(j_from_i(d, 3), Error);
}

TEST_CASE("log discriminant expansion") {
    PeriodicOperator op = random_operator(3, 23, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    InvariantSet inv = invariant_set(op);
    SeriesExpansion s = expand_log_delta(d, 3);

    CHECK(s.log_coefficient == doctest::Approx(7.0));
    CHECK(s.coeff(0) == doctest::Approx(std::log(d.I[0])));
    CHECK(rel(s.coeff(0), -inv.J[0]) < 1e-12);
    CHECK(rel(s.coeff(1), -d.I[1] / d.I[0]) < 1e-13);
    for (int k = 1; k <= 3; ++k) CHECK(rel(s.coeff(k), -inv.J[static_cast<std::size_t>(k)]) < 1e-9);
}

TEST_CASE("log multiplier expansion") {
    PeriodicOperator op = random_operator(3, 29, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    InvariantSet inv = invariant_set(op);
    SeriesExpansion s = expand_log_rho(op, d, 3);

    CHECK(s.log_coefficient == doctest::Approx(-7.0));
    for (int k = 0; k <= 3; ++k) CHECK(rel(s.coeff(k), inv.J[static_cast<std::size_t>(k)]) < 1e-6);
    CHECK(s.fit_error_estimate < 1e-9);

    // the two expansions are coefficient-wise negatives
    SeriesExpansion sd = expand_log_delta(d, 3);
    for (int k = 0; k <= 3; ++k) CHECK(rel(s.coeff(k), -sd.coeff(k)) < 1e-6);

    // constant lattice: singular curve, the formal identity still holds
    PeriodicOperator ones(std::vector<double>(3, 1.0));
    DeltaPolynomial dones = delta_combinatorial(ones);
    SeriesExpansion sones = expand_log_rho(ones, dones, 1);
    InvariantSet jones = invariant_set(ones);
    CHECK(std::abs(sones.coeff(0) - jones.J[0]) < 1e-9);
    CHECK(rel(sones.coeff(1), jones.J[1]) < 1e-9);
}

TEST_CASE("lambda^{2N+1}(ln rho + ln Delta) decays") {
    PeriodicOperator op = random_operator(2, 31, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    int n = op.gaps();
    double radius = lax_spectral_radius(op);
    auto tail = [&](double lam) {
        double dv = d.poly()(lam);
        double half = dv / 2.0;
        double lnr = -std::log(half + std::sqrt(half * half - 1.0));
        return std::pow(lam, 2.0 * n + 1.0) * (lnr + std::log(dv));
    };
    double t1 = tail(2.0 * radius), t2 = tail(4.0 * radius);
    CHECK(std::abs(t2) < 0.5 * std::abs(t1));
}

TEST_CASE("Q form") {
    PeriodicOperator op = random_operator(2, 41, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    double lam = 1.6 * lax_spectral_radius(op);

    double q1 = q_form(d, lam, BracketKind::quadratic);
    double q3 = q_form(d, lam, BracketKind::cubic);
    double lnr = std::log(std::abs(floquet_rho(d, Complex(lam, 0.0), -1)));
    CHECK(rel(q1 * lam, 2.0 * lnr) < 1e-12);
    CHECK(rel(q3, q1 / (lam * lam)) < 1e-12);

    CHECK_THROWS_AS(q_form(d, 0.0, BracketKind::quadratic), Error);
    // inside a band rho is unimodular
    CHECK_THROWS_AS(q_form(d, 1e-4, BracketKind::quadratic), Error);
}

TEST_CASE("flow hamiltonians in the Q expansion") {
    PeriodicOperator op = random_operator(3, 43, 0.5, 2.0);
    InvariantSet inv = invariant_set(op);

    ExpansionCheck quad = check_hamiltonian_expansion(op, BracketKind::quadratic);
    REQUIRE(quad.fitted.size() == 3);
    CHECK(quad.expected[0] == doctest::Approx(2.0 * inv.J[1]));
    CHECK(quad.max_rel_error < 1e-6);

    ExpansionCheck cub = check_hamiltonian_expansion(op, BracketKind::cubic);
    CHECK(cub.expected[0] == doctest::Approx(2.0 * inv.J[0]));
    CHECK(cub.max_rel_error < 1e-6);
}

TEST_CASE("differential basis from Q derivatives") {
    PeriodicOperator op = random_operator(2, 47, 0.5, 2.0);
    DeltaPolynomial d = delta_combinatorial(op);
    std::vector<double> samples = default_lambda_samples(d, 8);

    DifferentialCheck quad = check_differential_basis(d, BracketKind::quadratic, samples);
    CHECK(quad.max_rel_error < 1e-6);
    CHECK(quad.sample_condition < 1e8);

    DifferentialCheck cub = check_differential_basis(d, BracketKind::cubic, samples);
    CHECK(cub.max_rel_error < 1e-6);
    CHECK(cub.sample_condition < 1e8);

    // sigma parity: the checked exponents 2N+1-2m-mexp are all even
    int n = d.gaps();
    for (int m = 1; m <= n; ++m) CHECK((2 * n + 1 - 2 * m - 1) % 2 == 0);
    for (int m = 0; m < n; ++m) CHECK((2 * n + 1 - 2 * m - 3) % 2 == 0);
}
