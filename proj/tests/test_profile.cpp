#include "cuspflow/profile.hpp"

#include "cuspflow/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuspflow;

namespace {
const double params3[] = {3.0};
const double params2[] = {2.0};
} // namespace

TEST_CASE("poly-bump p=3 bump values and curvature") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    CHECK(p.theta(0.0) == 1.0);
    CHECK(p.theta_second(0.0) == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(p.theta_prime(0.0) == 0.0);
    // compact support
    CHECK(p.theta(1.0) == 0.0);
    CHECK(p.theta(2.5) == 0.0);
    CHECK(p.theta_prime(1.7) == 0.0);
    // closed form at an interior point
    const double y = 0.3;
    CHECK(p.theta(y) == doctest::Approx(std::pow(1.0 - 0.09, 3)).epsilon(1e-15));
}

TEST_CASE("poly-bump p=2 is rejected: not C^2 at the support edge") {
    CHECK_THROWS_AS(build_profile(ProfileFamily::poly_bump, params2, 1.0), profile_error);
    try {
        build_profile(ProfileFamily::poly_bump, params2, 1.0);
    } catch (const profile_error& e) {
        CHECK(e.violation == "support-edge-smoothness");
    }
}

TEST_CASE("violation names cover each admissibility check") {
    const double p1[] = {1.0};
    try {
        build_profile(ProfileFamily::poly_bump, p1, 1.0); // theta' (R) != 0
        FAIL("expected rejection");
    } catch (const profile_error& e) {
        CHECK(e.violation == "support-edge-smoothness");
    }
    const double bad[] = {3.0, 4.0};
    CHECK_THROWS_AS(build_profile(ProfileFamily::poly_bump, bad, 1.0), profile_error);
    CHECK_THROWS_AS(build_profile(ProfileFamily::poly_bump, params3, -1.0), profile_error);
}

TEST_CASE("zero family is admitted for diagnostics") {
    const auto p = build_profile(ProfileFamily::zero, {}, 1.0);
    CHECK(p.theta(0.0) == 0.0);
    CHECK(p.theta_second(0.0) == 0.0);
    const auto f = build_forcing(p, 1.0);
    CHECK(f.g0() == 0.0);
    CHECK(f.g_prime(0.5) == 0.0);
}

TEST_CASE("forcing: scaling identities") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);

    SUBCASE("eps0 = 1 means g = theta0, a = R") {
        const auto f = build_forcing(p, 1.0);
        CHECK(f.a == 1.0);
        CHECK(f.g(0.25) == p.theta(0.25));
        CHECK(f.g0() == 1.0);
    }
    SUBCASE("eps0 = 0.1: a = 10 and -g'(z) = 6*(0.1)^2*z*(1-0.01 z^2)^2") {
        const auto f = build_forcing(p, 0.1);
        CHECK(f.a == doctest::Approx(10.0));
        for (double z : {0.1, 0.9, 3.0, 7.5}) {
            const double expect = 6.0 * 0.01 * z * std::pow(1.0 - 0.01 * z * z, 2);
            CHECK(-f.g_prime(z) == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    SUBCASE("g(0) = theta0(0) exactly for any eps0") {
        for (double e0 : {1.0, 0.5, 0.37, 1e-3}) {
            CHECK(build_forcing(p, e0).g0() == p.theta0());
        }
    }
    SUBCASE("g(a) = 0 exactly") {
        for (double e0 : {1.0, 0.5, 0.1}) {
            const auto f = build_forcing(p, e0);
            CHECK(f.g(f.a) == 0.0);
        }
    }
    SUBCASE("eps0 out of (0,1] rejected") {
        CHECK_THROWS_AS(build_forcing(p, 0.0), config_error);
        CHECK_THROWS_AS(build_forcing(p, 1.5), config_error);
    }
}

TEST_CASE("k-bound fit: frozen values for eps0 = 0.1") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    const auto f = build_forcing(p, 0.1);
    const auto kb = fit_k_bounds(f);
    // ratio 6(1 - 0.01 z^2)^2 is monotone on (0,1]: inf at z=1, sup at z->0
    CHECK(kb.k0 == doctest::Approx(6.0 * 0.99 * 0.99).epsilon(1e-10));
    CHECK(kb.k1 == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(kb.k1 >= -p.theta_second(0.0) - 1e-12);
    CHECK(kb.k0 < kb.k1);
}

TEST_CASE("k-bound fit: eps0 = 1 is infeasible (-g'(1) = 0)") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    const auto f = build_forcing(p, 1.0);
    CHECK_THROWS_AS(fit_k_bounds(f), infeasible_error);
}

TEST_CASE("quadratic envelope holds at 1e4 samples") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    for (double e0 : {0.1, 0.43, 0.8}) {
        const auto f = build_forcing(p, e0);
        const auto kb = fit_k_bounds(f);
        const double e2 = e0 * e0;
        for (int i = 1; i <= 10000; ++i) {
            const double z = static_cast<double>(i) / 10000.0;
            const double lhs = e2 * kb.k0 * z;
            const double rhs = e2 * kb.k1 * z;
            const double mg = -f.g_prime(z);
            REQUIRE(lhs <= mg * (1.0 + 1e-12) + 1e-300);
            REQUIRE(mg <= rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("k bounds converge to -theta0''(0) as eps0 shrinks") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    double prev_gap = 1e9;
    for (double e0 : {0.5, 0.1, 0.02, 0.004}) {
        const auto kb = fit_k_bounds(build_forcing(p, e0));
        const double gap = std::max(std::fabs(kb.k0 - 6.0), std::fabs(kb.k1 - 6.0));
        CHECK(gap < prev_gap + 1e-15);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-4);
}

TEST_CASE("theta_drop agrees with direct difference where that is well-conditioned") {
    const auto p = build_profile(ProfileFamily::poly_bump, params3, 1.0);
    for (double y : {0.1, 0.3, 0.7, 0.95}) {
        CHECK(p.theta_drop(y) ==
              doctest::Approx(p.theta0() - p.theta(y)).epsilon(1e-12));
    }
    // and stays positive/accurate far below double-precision of the difference
    const double tiny = p.theta_drop(1e-9);
    CHECK(tiny == doctest::Approx(3e-18).epsilon(1e-9));
    CHECK(tiny > 0.0);
}
