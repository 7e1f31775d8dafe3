#include "cuspflow/analysis.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuspflow;

namespace {

Forcing ref1(double eps0 = 1.0) {
    const double params[] = {3.0};
    return build_forcing(build_profile(ProfileFamily::poly_bump, params, 1.0), eps0);
}

// synthetic Eulerian profile theta = theta0 - c y^nu on log-spaced y
EulerianProfile synthetic_power_law(double theta0, double c, double nu, int n = 200,
                                    double ylo = 1e-6, double yhi = 1e-1) {
    EulerianProfile p;
    p.theta0 = theta0;
    p.y.push_back(0.0);
    p.theta.push_back(theta0);
    p.drop.push_back(0.0);
    for (int i = 0; i < n; ++i) {
        const double y = ylo * std::pow(yhi / ylo, static_cast<double>(i) / (n - 1));
        const double d = c * std::pow(y, nu);
        p.y.push_back(y);
        p.theta.push_back(theta0 - d);
        p.drop.push_back(d);
    }
    p.y_at_unit_label = p.y.back();
    return p;
}

} // namespace

TEST_CASE("reconstruction: node pairing identities") {
    const auto fo = ref1(0.25);
    const auto g = make_grid(fo.a, 512);
    FlowState st;
    st.phi.assign(g.size(), 0.25);
    st.Phi = cumulative_phi(g, st.phi);
    const auto p = reconstruct_theta(g, st, fo);

    // at t = 0, theta(y_i) with y_i = eps0 x_i equals theta0(y_i)
    for (std::size_t i = 0; i < g.size(); i += 13) {
        REQUIRE(p.theta[i] == fo.profile.theta(0.25 * g.x[i]));
        REQUIRE(p.y[i] == doctest::Approx(0.25 * g.x[i]).epsilon(1e-13));
    }
    // maximum preserved exactly at the stagnant point
    CHECK(p.theta[0] == fo.g0());
    CHECK(p.y[0] == 0.0);
    // theta nonincreasing in y
    for (std::size_t i = 0; i + 1 < p.y.size(); ++i) REQUIRE(p.theta[i + 1] <= p.theta[i]);
    // interpolation endpoints
    CHECK(p.theta_at(0.0) == fo.g0());
    CHECK(p.theta_at(p.y.back() * 2.0) == p.theta.back());
}

TEST_CASE("mass-like identity: integral of theta_y equals g(a) - g(0)") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 2048);
    FlowState st;
    st.phi.assign(g.size(), 1.0);
    st.Phi = cumulative_phi(g, st.phi);
    const auto p = reconstruct_theta(g, st, fo);
    // trapezoid of theta_y dy = theta(ymax) - theta(0) (telescoping through nodes)
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < p.y.size(); ++i) total += p.theta[i + 1] - p.theta[i];
    CHECK(total == doctest::Approx(-fo.g0()).epsilon(1e-12));
}

TEST_CASE("power-law fitter is exact on synthetic power laws") {
    SUBCASE("theta = 1 - 0.7 y^0.5") {
        const auto fit = fit_cusp_exponent(synthetic_power_law(1.0, 0.7, 0.5));
        REQUIRE(fit.available);
        CHECK(*fit.nu_fit == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(*fit.c_fit == doctest::Approx(0.7).epsilon(1e-9));
        CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(fit.low_confidence);
        CHECK(fit.decade_span >= 3.0);
    }
    SUBCASE("theta = 1 - 0.3 y^(2/3)") {
        const auto fit = fit_cusp_exponent(synthetic_power_law(1.0, 0.3, 2.0 / 3.0));
        REQUIRE(fit.available);
        CHECK(*fit.nu_fit == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    }
    SUBCASE("explicit window restricts the fit range") {
        WindowPolicy w;
        w.kind = WindowPolicy::Kind::explicit_range;
        w.y_lo = 1e-4;
        w.y_hi = 1e-2;
        const auto fit = fit_cusp_exponent(synthetic_power_law(1.0, 0.7, 0.5), w);
        REQUIRE(fit.available);
        CHECK(fit.y_lo >= 1e-4 * 0.999);
        CHECK(fit.y_hi <= 1e-2 * 1.001);
        CHECK(*fit.nu_fit == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("too few nodes: unavailable") {
        const auto fit = fit_cusp_exponent(synthetic_power_law(1.0, 0.7, 0.5, 8));
        CHECK_FALSE(fit.available);
    }
}

TEST_CASE("cusp bound slack") {
    const auto p = synthetic_power_law(1.0, 0.7, 0.5);

    SUBCASE("zero constant: slack equals the drop, nonnegative, zero at y=0") {
        CuspBound b{0.0, 0.5, p.y.back()};
        const auto s = verify_cusp_bound(p, b);
        CHECK(s.min_slack == 0.0);  // attained at y = 0
        CHECK(s.n_checked == p.y.size());
    }
    SUBCASE("matching envelope: slack identically ~0") {
        CuspBound b{0.7, 0.5, p.y.back()};
        const auto s = verify_cusp_bound(p, b);
        CHECK(std::fabs(s.min_slack) < 1e-12);
    }
    SUBCASE("violating envelope reported as negative slack") {
        CuspBound b{1.4, 0.5, p.y.back()};
        const auto s = verify_cusp_bound(p, b);
        CHECK(s.min_slack < 0.0);
    }
}

TEST_CASE("needle diagnostic") {
    const auto fo = ref1(1.0);
    const auto g = make_grid(fo.a, 64, 3.0);

    SUBCASE("single snapshot, positive state: s0 = 0") {
        // phi = x^(1/beta) pattern with a positive floor at the origin node
        Snapshot s;
        s.t = 0.5;
        s.phi.resize(g.size());
        s.Phi.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            s.phi[i] = std::max(std::pow(g.x[i], 1.0 / 0.95), 1e-30);
        }
        BlowupReport rep; // no Ts: extrapolation degenerates to the current values
        NeedleOptions opts;
        opts.phi_threshold = 1e-31;
        const auto d = needle_diagnostic({s}, g, fo, rep, opts);
        CHECK(d.s0_estimate == 0.0);
        CHECK(d.flag == NeedleDiagnostic::Flag::cusp_like);
    }

    SUBCASE("zero forcing: vacuous cusp-like, zero gap") {
        const auto z = build_forcing(build_profile(ProfileFamily::zero, {}, 1.0), 1.0);
        Snapshot s;
        s.t = 10.0;
        s.phi.assign(g.size(), 1.0);
        s.Phi.assign(g.size(), 0.0);
        BlowupReport rep;
        const auto d = needle_diagnostic({s}, g, z, rep);
        CHECK(d.s0_estimate == 0.0);
        CHECK(d.theta_gap == 0.0);
        CHECK(d.flag == NeedleDiagnostic::Flag::cusp_like);
    }

    SUBCASE("synthetic collapsing inner zone is measured") {
        // phi(x, t_k) = max(eps_k, A x^3) sampled at decaying eps_k: nodes below
        // the crossover keep collapsing with eps and extrapolate to ~0.
        std::vector<Snapshot> snaps;
        const double A = 1.0;
        double t = 0.0;
        for (double eps = 1e-2; eps > 1e-7; eps *= 0.4) {
            Snapshot s;
            s.t = t;
            t += 0.1 * std::pow(eps, 0.5); // consistent with eps_t ~ -C eps^0.5
            s.phi.resize(g.size());
            s.Phi.resize(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                s.phi[i] = std::max(eps, A * std::pow(std::max(g.x[i], 1e-300), 3.0));
            }
            snaps.push_back(std::move(s));
        }
        BlowupReport rep;
        rep.detected = true;
        rep.Ts_estimate = snaps.back().t + 1e-4;
        NeedleOptions opts;
        opts.phi_threshold = 1e-8;
        const auto d = needle_diagnostic(snaps, g, fo, rep, opts);
        // crossover of the final profile sits near (eps/A)^(1/3)
        CHECK(d.s0_estimate > 0.0);
        CHECK(d.s0_estimate < 2e-2);
    }
}
