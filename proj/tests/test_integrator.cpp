#include "cuspflow/integrator.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuspflow;

namespace {

Forcing ref1(double eps0 = 1.0) {
    const double params[] = {3.0};
    return build_forcing(build_profile(ProfileFamily::poly_bump, params, 1.0), eps0);
}

FlowState initial_state(const LagrangianGrid& g, double eps0) {
    FlowState st;
    st.phi.assign(g.size(), eps0);
    st.Phi = cumulative_phi(g, st.phi);
    return st;
}

} // namespace

TEST_CASE("rhs: value at the stagnant point and structural zeros") {
    const auto fo = ref1(0.5);
    const auto g = make_grid(fo.a, 2048);
    const auto st = initial_state(g, 0.5);
    const auto f = rhs(g, st, fo);
    // d(eps)/dt = eps * I(0,0) = eps0 * (-16/5)
    CHECK(f[0] == doctest::Approx(0.5 * -3.2).epsilon(1e-9));
    CHECK(f.back() == 0.0);

    const auto z = build_forcing(build_profile(ProfileFamily::zero, {}, 1.0), 0.5);
    const auto fz = rhs(g, st, z);
    for (double v : fz) REQUIRE(v == 0.0);
}

TEST_CASE("step: stationary solution advances time only") {
    const auto z = build_forcing(build_profile(ProfileFamily::zero, {}, 1.0), 1.0);
    const auto g = make_grid(z.a, 64);
    const auto st = initial_state(g, 1.0);
    const auto [next, err] = step(g, st, z, 0.25, StepControl{});
    CHECK(next.t == 0.25);
    CHECK(err == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(next.phi[i] == st.phi[i]);
}

TEST_CASE("step: first-order expansion of eps and invariant propagation") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 1024);
    const auto st = initial_state(g, 1.0);
    const double dt = 1e-4;
    const auto [next, err] = step(g, st, fo, dt, StepControl{});
    CHECK(next.phi[0] == doctest::Approx(1.0 - 3.2 * dt).epsilon(1e-6));
    CHECK(err < 1.0);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        REQUIRE(next.phi[i] <= next.phi[i + 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("step doubling: one dt step vs two dt/2 steps differ at 5th order") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 512);
    const auto st = initial_state(g, 1.0);
    StepControl ctl;
    double prev_gap = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dt = 0.02 / std::pow(2.0, k);
        const auto [one, e1] = step(g, st, fo, dt, ctl);
        const auto [halfa, e2] = step(g, st, fo, 0.5 * dt, ctl);
        const auto [halfb, e3] = step(g, halfa, fo, 0.5 * dt, ctl);
        double gap = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            gap = std::max(gap, std::fabs(one.phi[i] - halfb.phi[i]));
        }
        if (k > 0) {
            // halving dt should shrink the gap by ~2^5 (allow a loose band)
            CHECK(prev_gap / gap > 16.0);
            CHECK(prev_gap / gap < 80.0);
        }
        prev_gap = gap;
    }
}

TEST_CASE("adapt_dt: guard logic") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 64);
    const auto st = initial_state(g, 1.0);
    StepControl ctl;
    ctl.dt_max = 0.5;
    ctl.safety = 0.05;

    std::vector<double> quiet(g.size(), 0.0);
    CHECK(adapt_dt(st, quiet, ctl) == 0.5); // no constraint active

    std::vector<double> active(g.size(), 0.0);
    active[0] = -3.2; // d(eps)/dt at the initial REF1 state
    CHECK(adapt_dt(st, active, ctl) == doctest::Approx(0.05 / 3.2).epsilon(1e-12));

    bool stalled = false;
    CHECK(adapt_dt(st, active, ctl, 1e-20, &stalled) >= 1e-14);
    CHECK(stalled);
}

TEST_CASE("run: REF1 blows up before t = 1 with clean rate fit") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 1024);
    RunSetup setup;
    setup.grid = &g;
    setup.forcing = &fo;
    const auto res = run(setup, StepControl{.eps_stop = 1e-6});
    REQUIRE(res.outcome == RunOutcome::blowup);
    CHECK(res.final_state.eps() <= 1e-6);
    CHECK(res.final_state.t < 1.0);
    REQUIRE(res.blowup.Ts_estimate.has_value());
    CHECK(*res.blowup.Ts_estimate < 1.0);
    CHECK(*res.blowup.Ts_estimate > res.blowup.t_stop);
    CHECK(*res.blowup.beta_eff > 0.0);
    CHECK(*res.blowup.beta_eff < 1.0);
    CHECK(*res.blowup.fit_r2 > 0.99);
    // universal invariants held
    CHECK(res.universal.eps_strictly_decreasing);
    CHECK(res.universal.min_eta >= 1.0 - 1e-10);
    CHECK(res.universal.worst_monotonicity >= -1e-12);
    CHECK(res.universal.worst_time_increase <= 1e-12);
    CHECK(res.violations.empty());
}

TEST_CASE("run: stationary forcing exits at the horizon") {
    const auto z = build_forcing(build_profile(ProfileFamily::zero, {}, 1.0), 1.0);
    const auto g = make_grid(z.a, 64);
    RunSetup setup;
    setup.grid = &g;
    setup.forcing = &z;
    StepControl ctl;
    ctl.t_max = 10.0;
    const auto res = run(setup, ctl);
    CHECK(res.outcome == RunOutcome::no_blowup_within_horizon);
    CHECK(res.final_state.t >= 10.0 - 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        REQUIRE(std::fabs(res.final_state.phi[i] - 1.0) <= 1e-14);
    }
}

TEST_CASE("extrapolate_Ts oracles") {
    SUBCASE("eps = (1 - t)^2 recovers beta = 1/2, C = 2, Ts = 1") {
        std::vector<double> ts, eps;
        for (int i = 0; i <= 990; ++i) {
            const double t = 0.001 * i;
            ts.push_back(t);
            eps.push_back((1.0 - t) * (1.0 - t));
        }
        const auto fit = extrapolate_Ts(ts, eps);
        REQUIRE(fit.available);
        CHECK(fit.beta_eff == doctest::Approx(0.5).epsilon(0.002));
        CHECK(fit.C_eff == doctest::Approx(2.0).epsilon(0.01));
        REQUIRE(fit.Ts.has_value());
        CHECK(*fit.Ts == doctest::Approx(1.0).epsilon(0.001));
        CHECK(fit.r2 > 0.9999);
    }
    SUBCASE("exponential decay: beta ~ 1, no finite singular time") {
        std::vector<double> ts, eps;
        for (int i = 0; i <= 4000; ++i) {
            const double t = 0.005 * i;
            ts.push_back(t);
            eps.push_back(std::exp(-t));
        }
        const auto fit = extrapolate_Ts(ts, eps);
        REQUIRE(fit.available);
        CHECK(fit.beta_eff == doctest::Approx(1.0).epsilon(0.01));
        CHECK_FALSE(fit.Ts.has_value());
    }
    SUBCASE("constant eps: fit unavailable") {
        std::vector<double> ts, eps;
        for (int i = 0; i < 100; ++i) {
            ts.push_back(0.01 * i);
            eps.push_back(0.7);
        }
        CHECK_FALSE(extrapolate_Ts(ts, eps).available);
    }
    SUBCASE("insufficient decay range: fit unavailable") {
        std::vector<double> ts, eps;
        for (int i = 0; i < 40; ++i) {
            ts.push_back(0.01 * i);
            eps.push_back(1.0 - 1e-4 * i);
        }
        CHECK_FALSE(extrapolate_Ts(ts, eps).available);
    }
}

TEST_CASE("default stopping threshold") {
    CHECK(default_eps_stop(1.0) == 1e-6);
    CHECK(default_eps_stop(1e-8) == 1e-12);
}
