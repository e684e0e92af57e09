#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "volterra/lattice.hpp"

using namespace volterra;

TEST_CASE("construction and validation") {
    PeriodicOperator op = new_operator({1.0, 1.0, 1.0});
    CHECK(op.period() == 3);
    CHECK(op.gaps() == 1);
    CHECK(op.a(0) == 1.0);

    PeriodicOperator sq = new_operator({1.0, 4.0, 9.0});
    CHECK(sq.a(0) == 1.0);
    CHECK(sq.a(1) == 2.0);
    CHECK(sq.a(2) == 3.0);

    CHECK_THROWS_AS(new_operator({1.0, 2.0, 3.0, 4.0}), Error);  // even period
    CHECK_THROWS_AS(new_operator({1.0}), Error);                 // too short
    CHECK_THROWS_AS(new_operator({1.0, -2.0, 3.0}), Error);      // nonpositive weight

    try {
        new_operator({1.0, 2.0, 3.0, 4.0});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::even_period);
        CHECK(is_input_error(e.code()));
    }
}

TEST_CASE("a_i squares back to c_i") {
    PeriodicOperator op = random_operator(3, 99, 0.5, 2.0);
    for (int i = 0; i < op.period(); ++i)
        CHECK(op.a(i) * op.a(i) == doctest::Approx(op.c(i)).epsilon(1e-15));
}

TEST_CASE("cyclic indexing") {
    PeriodicOperator op = new_operator({1.0, 2.0, 3.0, 4.0, 5.0});
    for (int i = 0; i < op.period(); ++i) {
        CHECK(op.c(i) == op.c(i + op.period()));
        CHECK(op.c(i) == op.c(i - op.period()));
    }
}

TEST_CASE("random operators are reproducible") {
    PeriodicOperator a = random_operator(1, 42, 0.5, 2.0);
    PeriodicOperator b = random_operator(1, 42, 0.5, 2.0);
    CHECK(a == b);

    PeriodicOperator c = random_operator(3, 7, 0.5, 2.0);
    CHECK(c.period() == 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(c.c(i) >= 0.5);
        CHECK(c.c(i) <= 2.0);
    }

    PeriodicOperator d = random_operator(2, 5, 1.0, 1.0);  // degenerate range
    for (int i = 0; i < 5; ++i) CHECK(d.c(i) == 1.0);

    CHECK_THROWS_AS(random_operator(0, 1, 0.5, 2.0), Error);
    CHECK_THROWS_AS(random_operator(1, 1, -1.0, 2.0), Error);
    CHECK_THROWS_AS(random_operator(1, 1, 2.0, 0.5), Error);
}

TEST_CASE("perturb") {
    PeriodicOperator op = random_operator(2, 11, 0.5, 2.0);
    PeriodicOperator same = perturb(op, 1, 0.0);
    CHECK(same == op);

    PeriodicOperator up = perturb(op, 1, 1e-3);
    PeriodicOperator dn = perturb(op, 1, -1e-3);
    for (int i = 0; i < op.period(); ++i) {
        if (i == 1) {
            CHECK(up.c(i) == doctest::Approx(op.c(i) + 1e-3));
            CHECK(dn.c(i) == doctest::Approx(op.c(i) - 1e-3));
        } else {
            CHECK(up.c(i) == op.c(i));
            CHECK(dn.c(i) == op.c(i));
        }
    }
    CHECK_THROWS_AS(perturb(op, 0, -op.c(0)), Error);  // positivity guard
}

TEST_CASE("construction round trip") {
    PeriodicOperator op = random_operator(4, 3, 0.5, 2.0);
    PeriodicOperator again = new_operator(op.weights());
    CHECK(again == op);
}

TEST_CASE("tolerance config validation") {
    ToleranceConfig ok;
    CHECK_NOTHROW(ok.validate());
    ToleranceConfig bad;
    bad.fd_step = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}
