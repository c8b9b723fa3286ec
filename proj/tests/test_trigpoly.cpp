#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hexscat/trigpoly.hpp"

using namespace hexscat;
using std::numbers::pi;

TEST_CASE("alpha and r coefficients") {
    const TrigPoly a = TrigPoly::alpha();
    CHECK(a.coeff({0, 0}) == GaussInt{1, 0});
    CHECK(a.coeff({1, 0}) == GaussInt{1, 0});
    CHECK(a.coeff({0, 1}) == GaussInt{1, 0});
    CHECK(a.coeff({1, 1}) == GaussInt{0, 0});
    CHECK(a.coeffs().size() == 3);

    const TrigPoly r = TrigPoly::r();
    CHECK(r.coeff({0, 0}) == GaussInt{3, 0});
    CHECK(r.coeff({1, -1}) == GaussInt{1, 0});
    CHECK(r.coeff({-1, 1}) == GaussInt{1, 0});
    for (LatticeSite n : {LatticeSite{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        CHECK(r.coeff(n) == GaussInt{1, 0});
    CHECK(r.coeffs().size() == 7);
}

TEST_CASE("powers by exact convolution") {
    const TrigPoly r = TrigPoly::r();
    CHECK(r.pow(0).coeff({0, 0}) == GaussInt{1, 0});
    CHECK(r.pow(0).coeffs().size() == 1);
    CHECK(r.pow(2).coeff({0, 0}) == GaussInt{15, 0});
    CHECK(r.pow(3).coeff({3, 0}) == GaussInt{1, 0});
    CHECK_THROWS_AS(r.pow(-1), std::invalid_argument);
}

TEST_CASE("evaluation") {
    const TrigPoly a = TrigPoly::alpha();
    const TrigPoly r = TrigPoly::r();
    CHECK(std::abs(a.eval(0.0, 0.0) - 3.0) < 1e-15);
    CHECK(std::abs(a.eval(2 * pi / 3, -2 * pi / 3)) < 1e-14);  // Dirac point
    CHECK(std::abs(r.eval(pi / 2, -pi / 2) - 1.0) < 1e-14);
}

TEST_CASE("eval is multiplicative and conjugation matches") {
    const TrigPoly a = TrigPoly::alpha();
    const TrigPoly r = TrigPoly::r();
    const TrigPoly r2 = r * r;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-pi, pi);
    for (int trial = 0; trial < 50; ++trial) {
        const double x1 = uni(rng), x2 = uni(rng);
        const auto pq = (a * r).eval(x1, x2);
        CHECK(std::abs(pq - a.eval(x1, x2) * r.eval(x1, x2)) < 1e-12);
        CHECK(std::abs(r2.eval(x1, x2) - r.eval(x1, x2) * r.eval(x1, x2)) < 1e-12);
        // conj(alpha) evaluated at real xi equals the conjugate value
        CHECK(std::abs(TrigPoly::conj_alpha().eval(x1, x2) - std::conj(a.eval(x1, x2))) < 1e-13);
        // r is real nonnegative on the real torus
        CHECK(r.eval(x1, x2).imag() == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(r.eval(x1, x2).real() >= -1e-13);
    }
}

TEST_CASE("r coefficients are real") {
    const TrigPoly r3 = TrigPoly::r().pow(3);
    for (const auto& [n, v] : r3.coeffs()) {
        (void)n;
        CHECK(v.im == 0);
    }
}

TEST_CASE("support lemmas, exact") {
    const SupportReport rep = verify_support(8);
    CHECK(rep.all_pass);
    // extremal frequencies are attained: max distance equals s
    for (const auto& c : rep.checks) CHECK(c.max_dist == c.s);
    // spot value forced to zero by the lemma
    CHECK(TrigPoly::r().pow(3).coeff({4, 0}) == GaussInt{0, 0});
    // s = 0: alpha supported in {D12 <= 0}
    const TrigPoly a = TrigPoly::alpha();
    for (const auto& [n, v] : a.coeffs()) {
        (void)v;
        CHECK(dist(DistKind::D12, n) <= 0);
    }
}

TEST_CASE("eval overflow guard") {
    const TrigPoly a = TrigPoly::alpha();
    CHECK_THROWS_AS(a.eval({0.0, 800.0}, {0.0, 0.0}), std::overflow_error);
}
