#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "volterra/poly.hpp"

using namespace volterra;

TEST_CASE("arithmetic and evaluation") {
    Poly p({1.0, 2.0, 3.0});  // 1 + 2x + 3x^2
    Poly q({0.0, 1.0});       // x
    CHECK(p.degree() == 2);
    CHECK(p(2.0) == doctest::Approx(17.0));

    Poly sum = p + q;
    CHECK(sum.coeff(1) == doctest::Approx(3.0));
    Poly prod = p * q;  // x + 2x^2 + 3x^3
    CHECK(prod.degree() == 3);
    CHECK(prod.coeff(3) == doctest::Approx(3.0));
    Poly d = p.derivative();  // 2 + 6x
    CHECK(d.degree() == 1);
    CHECK(d(1.0) == doctest::Approx(8.0));
}

TEST_CASE("roots of products of known linear factors") {
    // (x-1)(x-2)(x-3) = -6 + 11x - 6x^2 + x^3
    Poly p({-6.0, 11.0, -6.0, 1.0});
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(roots[1].real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(roots[2].real() == doctest::Approx(3.0).epsilon(1e-12));
    for (const auto& r : roots) CHECK(std::abs(r.imag()) < 1e-12);
}

TEST_CASE("complex conjugate roots") {
    // (x^2+1)(x-2) = -2 + x - 2x^2 + x^3
    Poly p({-2.0, 1.0, -2.0, 1.0});
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 3);
    double imag_mag = 0.0;
    for (const auto& r : roots) imag_mag = std::max(imag_mag, std::abs(r.imag()));
    CHECK(imag_mag == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random polynomials: computed roots reproduce the polynomial") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        int deg = 3 + static_cast<int>(rng() % 15);
        std::vector<double> c(static_cast<std::size_t>(deg) + 1);
        for (double& v : c) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        if (std::abs(c.back()) < 0.1) c.back() = 1.0;
        Poly p(c);
        auto roots = poly_roots(p);
        REQUIRE(static_cast<int>(roots.size()) == deg);
        // residual |p(r)| relative to the evaluation scale at each root
        for (const auto& r : roots) {
            double scale = 0.0, pw = 1.0;
            for (int k = 0; k <= deg; ++k) {
                scale += std::abs(p.coeff(k)) * pw;
                pw *= std::abs(r);
            }
            CHECK(std::abs(p(r)) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("cauchy bound encloses all roots") {
    Poly p({-6.0, 11.0, -6.0, 1.0});
    double bound = cauchy_root_bound(p);
    for (const auto& r : poly_roots(p)) CHECK(std::abs(r) <= bound);
}
