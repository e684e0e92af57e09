#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "volterra/flows.hpp"
#include "volterra/invariants.hpp"

using namespace volterra;

TEST_CASE("Volterra right-hand side") {
    std::vector<double> ones(5, 1.0);
    for (double v : volterra_rhs(ones)) CHECK(v == 0.0);

    auto r = volterra_rhs({1.0, 2.0, 3.0});
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(4.0));
    CHECK(r[2] == doctest::Approx(-3.0));

    // sum rhs_i / c_i telescopes: J_0 is conserved
    PeriodicOperator op = random_operator(3, 3, 0.5, 2.0);
    auto rr = volterra_rhs(op.weights());
    double s = 0.0;
    for (int i = 0; i < op.period(); ++i) s += rr[static_cast<std::size_t>(i)] / op.c(i);
    CHECK(std::abs(s) < 1e-13);
}

TEST_CASE("higher flows") {
    PeriodicOperator op = random_operator(3, 5, 0.5, 2.0);
    int t = op.period();

    auto v = volterra_rhs(op.weights());
    auto h1 = higher_rhs(op, 1);
    for (int i = 0; i < t; ++i) CHECK(v[static_cast<std::size_t>(i)] == h1[static_cast<std::size_t>(i)]);

    // both bracket routes produce the same flow
    for (int k = 1; k <= 3; ++k) {
        auto a = higher_rhs(op, k);
        auto b = higher_rhs_cubic_route(op, k);
        double scale = 0.0;
        for (double x : a) scale = std::max(scale, std::abs(x));
        for (int i = 0; i < t; ++i)
            CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) <
                  1e-9 * std::max(1.0, scale));
    }

    // locality: machine-zero sensitivity outside cyclic distance k, live at k
    for (int k = 1; k <= 3; ++k) {
        auto base = higher_rhs(op, k);
        for (int j = 0; j < t; ++j) {
            auto pert = higher_rhs(perturb(op, j, 0.3 * op.c(j)), k);
            for (int i = 0; i < t; ++i) {
                int d = std::min(std::abs(i - j), t - std::abs(i - j));
                double diff = std::abs(pert[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]);
                if (d > k) CHECK(diff == 0.0);
                if (d == k) CHECK(diff != 0.0);
            }
        }
    }

    CHECK_THROWS_AS(higher_rhs(op, 0), Error);
    CHECK_THROWS_AS(higher_rhs(op, 4), Error);
}

TEST_CASE("integration") {
    // constant lattice is a fixed point
    PeriodicOperator ones(std::vector<double>(5, 1.0));
    Trajectory fixed = integrate(ones, 1, 1.0);
    for (const auto& state : fixed.states)
        for (double v : state) CHECK(v == doctest::Approx(1.0));

    PeriodicOperator op = random_operator(3, 7, 0.5, 2.0);
    Trajectory traj = integrate(op, 1, 10.0);
    CHECK(traj.endpoint_error_estimate < 1e-8);
    CHECK(std::is_sorted(traj.t.begin(), traj.t.end()));
    for (const auto& state : traj.states)
        for (double v : state) CHECK(v > 0.0);

    ConservationReport rep = conservation_report(traj);
    for (double d : rep.i_drift) CHECK(d < 1e-7);
    for (double d : rep.j_drift) CHECK(d < 1e-7);
    CHECK(rep.delta_at_probe_drift < 1e-7);

    // time reversal via the generic map
    auto fwd = [](const std::vector<double>& c) { return volterra_rhs(c); };
    auto bwd = [](const std::vector<double>& c) {
        auto r = volterra_rhs(c);
        for (double& x : r) x = -x;
        return r;
    };
    auto there = rk4_map(fwd, op.weights(), 1.0, 4000);
    auto back = rk4_map(bwd, there, 1.0, 4000);
    for (int i = 0; i < op.period(); ++i)
        CHECK(std::abs(back[static_cast<std::size_t>(i)] - op.c(i)) < 1e-7 * std::max(1.0, op.c(i)));

    // an unreachable endpoint tolerance exhausts the halving budget
    StepControl strict;
    strict.endpoint_rel_tol = 1e-30;
    strict.max_halvings = 3;
    CHECK_THROWS_AS(integrate(op, 1, 1.0, strict), Error);
    CHECK_THROWS_AS(integrate(op, 1, -1.0), Error);
}

TEST_CASE("flow commutativity") {
    PeriodicOperator op = random_operator(2, 9, 0.5, 2.0);
    CHECK(commutativity_residual(op, 1, 2, 1e-3) >= 0.0);
    CHECK(commutativity_residual(op, 2, 2, 1e-3) == 0.0);

    double r1 = commutativity_residual(op, 1, 2, 1e-3);
    double r2 = commutativity_residual(op, 1, 2, 5e-4);
    double ratio = r1 / r2;
    CHECK(ratio > 4.0);
    CHECK(ratio < 16.0);

    PeriodicOperator op7 = random_operator(3, 11, 0.5, 2.0);
    double s1 = commutativity_residual(op7, 1, 3, 1e-3);
    double s2 = commutativity_residual(op7, 1, 3, 5e-4);
    CHECK(s1 / s2 > 4.0);
    CHECK(s1 / s2 < 16.0);
}

TEST_CASE("branch points are flow invariants") {
    PeriodicOperator op = random_operator(2, 13, 0.5, 2.0);
    Trajectory traj = integrate(op, 1, 2.0);
    SpectralCurve c0 = spectral_curve(delta_combinatorial(PeriodicOperator(traj.states.front())));
    SpectralCurve c1 = spectral_curve(delta_combinatorial(PeriodicOperator(traj.states.back())));
    REQUIRE(c0.branch_plus.size() == c1.branch_plus.size());
    for (std::size_t i = 0; i < c0.branch_plus.size(); ++i)
        CHECK(std::abs(c0.branch_plus[i] - c1.branch_plus[i]) < 1e-6);
}
