#include "cuspflow/flowfield.hpp"

#include "cuspflow/integrator.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuspflow;

namespace {

Forcing ref1(double eps0 = 1.0) {
    const double params[] = {3.0};
    return build_forcing(build_profile(ProfileFamily::poly_bump, params, 1.0), eps0);
}

RunResult run_ref1(std::size_t n, double eps_stop_rel = 1e-6) {
    static thread_local std::optional<std::pair<std::size_t, RunResult>> cache;
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, n);
    RunSetup setup;
    setup.grid = &g;
    setup.forcing = &fo;
    setup.snapshot_stride = 20;
    StepControl ctl;
    ctl.eps_stop = eps_stop_rel;
    return run(setup, ctl);
}

} // namespace

TEST_CASE("initial flow map: Phi(a,0) = eps0 * a = R") {
    for (double e0 : {1.0, 0.2}) {
        const auto fo = ref1(e0);
        const auto g = make_grid(fo.a, 256);
        FlowState st;
        st.phi.assign(g.size(), e0);
        st.Phi = cumulative_phi(g, st.phi);
        CHECK(support_drift(st) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("support drift follows the exact identity Phi(a,t) = 1 - t") {
    const auto res = run_ref1(1024);
    REQUIRE(res.outcome == RunOutcome::blowup);
    CHECK(res.universal.max_drift_residual < 1e-5); // second-order quadrature at N=1024
    CHECK(support_drift(res.final_state) ==
          doctest::Approx(1.0 - res.final_state.t).epsilon(1e-5));
}

TEST_CASE("zero forcing: flow map frozen") {
    const auto p = build_profile(ProfileFamily::zero, {}, 1.0);
    const auto fo = build_forcing(p, 1.0);
    const auto g = make_grid(fo.a, 64);
    RunSetup setup;
    setup.grid = &g;
    setup.forcing = &fo;
    StepControl ctl;
    ctl.t_max = 3.0;
    const auto res = run(setup, ctl);
    CHECK(res.outcome == RunOutcome::no_blowup_within_horizon);
    CHECK(support_drift(res.final_state) == support_drift(FlowState{0.0, res.snapshots[0].phi,
                                                                    res.snapshots[0].Phi}));
}

TEST_CASE("nonlocal-law equivalence: Lagrangian vs Eulerian route") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 4096);
    const std::size_t n = g.size();

    auto check_state = [&](const FlowState& st, double tol) {
        const auto vg = velocity_gradient(g, st, fo);
        std::vector<double> th(n);
        for (std::size_t i = 0; i < n; ++i) th[i] = fo.g(g.x[i]);
        const double ymax = st.Phi.back();
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double frac = std::pow(10.0, -3.0 + (3.0 - 0.30103) * k / 19.0);
            const auto i = static_cast<std::size_t>(
                std::lower_bound(st.Phi.begin(), st.Phi.end(), frac * ymax) -
                st.Phi.begin());
            const double eul = eulerian_velocity_gradient(th, st.Phi, st.Phi[i]);
            const double rel = std::fabs(eul - vg.I[i]) / std::fabs(vg.I[i]);
            worst = std::max(worst, rel);
        }
        CHECK(worst < tol);
    };

    FlowState st0;
    st0.phi.assign(n, 1.0);
    st0.Phi = cumulative_phi(g, st0.phi);
    check_state(st0, 1e-4);

    // mid-run state near eps/eps0 = 1e-2
    const auto res = run_ref1(4096, 5e-3);
    REQUIRE(res.outcome == RunOutcome::blowup);
    const Snapshot* pick = &res.snapshots.front();
    for (const auto& s : res.snapshots) {
        if (std::fabs(std::log(s.phi[0] / 1e-2)) <
            std::fabs(std::log(pick->phi[0] / 1e-2))) {
            pick = &s;
        }
    }
    check_state(FlowState{pick->t, pick->phi, pick->Phi}, 1e-4);
}
