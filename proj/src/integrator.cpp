#include "cuspflow/integrator.hpp"

#include "cuspflow/errors.hpp"
#include "cuspflow/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cuspflow {
namespace {

// Dormand-Prince 5(4), FSAL.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Workspace-backed stepper; FSAL reuses the last stage as the next first one.
class Dopri5 {
  public:
    Dopri5(const LagrangianGrid& grid, const Forcing& forcing)
        : grid_(grid), n_(grid.size()), scratch_(2 * n_), gp_(n_),
          gpp0_(forcing.g_second(0.0)) {
        for (std::size_t i = 0; i < n_; ++i) gp_[i] = forcing.g_prime(grid.x[i]);
        for (auto& k : k_) k.resize(n_);
        ytmp_.resize(n_);
        err_.resize(n_);
        Phi_tmp_.resize(n_);
        I_tmp_.resize(n_);
        rhs_evals = 0;
    }

    // d(phi)/dt into out; also exposes Phi and I of that evaluation.
    void eval_rhs(std::span<const double> phi, std::span<double> out,
                  std::span<double> Phi_out, std::span<double> I_out) {
        pack_Phi(phi, Phi_out);
        velocity_gradient_core(grid_, phi, Phi_out, gp_, gpp0_, I_out, scratch_);
        kernels::ops().mul(phi.data(), I_out.data(), out.data(), n_);
        ++rhs_evals;
    }

    void prime(std::span<const double> phi) {
        eval_rhs(phi, k_[0], Phi_tmp_, I_tmp_);
        primed_ = true;
    }

    struct Attempt {
        bool positive = false;
        double err_norm = 0.0;
    };

    // One dt attempt from phi; on success y_new/Phi_new/I_new hold the
    // advanced state and its first stage is cached for FSAL.
    Attempt attempt(std::span<const double> phi, double dt, std::vector<double>& y_new,
                    std::vector<double>& Phi_new, std::vector<double>& I_new) {
        const auto& K = kernels::ops();
        if (!primed_) prime(phi);
        const double* ks[7];
        for (int s = 0; s < 7; ++s) ks[s] = k_[s].data();

        static constexpr double A2[] = {a21};
        static constexpr double A3[] = {a31, a32};
        static constexpr double A4[] = {a41, a42, a43};
        static constexpr double A5[] = {a51, a52, a53, a54};
        static constexpr double A6[] = {a61, a62, a63, a64, a65};
        static constexpr double B[] = {b1, 0.0, b3, b4, b5, b6};
        static constexpr const double* stage_coef[] = {A2, A3, A4, A5, A6};

        Attempt r;
        for (int s = 1; s <= 5; ++s) {
            K.stage_combine(ytmp_.data(), phi.data(), dt, stage_coef[s - 1], ks,
                            static_cast<std::size_t>(s), n_);
            if (K.vmin(ytmp_.data(), n_) <= 0.0) return r; // positivity reject
            eval_rhs(ytmp_, k_[s], Phi_tmp_, I_tmp_);
        }
        K.stage_combine(y_new.data(), phi.data(), dt, B, ks, 6, n_);
        if (K.vmin(y_new.data(), n_) <= 0.0) return r;
        eval_rhs(y_new, k_[6], Phi_new, I_new); // stage 7 = rhs at the 5th-order solution

        static constexpr double E[] = {e1, 0.0, e3, e4, e5, e6, e7};
        K.stage_combine(err_.data(), nullptr, dt, E, ks, 7, n_);
        r.positive = true;
        r.err_norm = K.err_norm_max(err_.data(), phi.data(), rk_tol_scale_, n_);
        return r;
    }

    // Accepting the attempt makes its last stage the next first stage (FSAL).
    void accept() { std::swap(k_[0], k_[6]); }

    void set_rtol(double rtol) { rk_tol_scale_ = rtol; }
    std::span<const double> first_stage() const { return k_[0]; }
    std::size_t rhs_evals = 0;

  private:
    void pack_Phi(std::span<const double> phi, std::span<double> out) {
        kernels::ops().pair_sum(grid_.trap_w.data(), phi.data(), seg_().data(), n_ - 1);
        out[0] = 0.0;
        const auto& seg = seg_();
        for (std::size_t j = 0; j + 1 < n_; ++j) out[j + 1] = out[j] + seg[j];
    }

    std::vector<double>& seg_() {
        if (segbuf_.size() != n_ - 1) segbuf_.resize(n_ - 1);
        return segbuf_;
    }

    const LagrangianGrid& grid_;
    std::size_t n_;
    std::vector<double> scratch_, gp_, ytmp_, err_, Phi_tmp_, I_tmp_, segbuf_;
    std::vector<double> k_[7];
    double gpp0_;
    double rk_tol_scale_ = 1e-10;
    bool primed_ = false;
};

double controller_factor(double err_norm) {
    if (err_norm <= 0.0) return 5.0;
    return std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
}

double dt_floor(double t) {
    return 1e-14 * std::max(1.0, std::fabs(t));
}

} // namespace

double default_eps_stop(double eps0) {
    return std::max(1e-12, 1e-6 * eps0);
}

std::vector<double> rhs(const LagrangianGrid& grid, const FlowState& state,
                        const Forcing& forcing) {
    const auto vg = velocity_gradient(grid, state, forcing);
    std::vector<double> out(grid.size());
    kernels::ops().mul(state.phi.data(), vg.I.data(), out.data(), grid.size());
    return out;
}

std::pair<FlowState, double> step(const LagrangianGrid& grid, const FlowState& state,
                                  const Forcing& forcing, double dt,
                                  const StepControl& control) {
    if (!(dt > 0.0)) throw config_error("step: dt must be positive");
    Dopri5 stepper(grid, forcing);
    stepper.set_rtol(control.rk_tolerance);
    FlowState out;
    out.t = state.t + dt;
    out.phi.resize(grid.size());
    out.Phi.resize(grid.size());
    std::vector<double> I(grid.size());
    const auto att = stepper.attempt(state.phi, dt, out.phi, out.Phi, I);
    if (!att.positive) {
        throw state_error("step: phi lost positivity (reject and halve dt)");
    }
    return {std::move(out), att.err_norm};
}

double adapt_dt(const FlowState& state, std::span<const double> rhs_values,
                const StepControl& control, double embedded_suggestion, bool* stalled) {
    double dt = std::min(control.dt_max, embedded_suggestion);
    const double deps = std::fabs(rhs_values[0]);
    if (deps > 0.0) dt = std::min(dt, control.safety * state.eps() / deps);
    const double floor = dt_floor(state.t);
    if (stalled) *stalled = dt < floor;
    return std::max(dt, floor);
}

TsFit extrapolate_Ts(std::span<const double> t_samples, std::span<const double> eps_samples,
                     double window_decades) {
    TsFit fit;
    const std::size_t n = t_samples.size();
    if (n != eps_samples.size() || n < 3) return fit;

    // centered differences at interior samples; keep decaying ones
    std::vector<double> lt, le, ld; // log eps, log(-deps/dt) at kept samples
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = (eps_samples[i + 1] - eps_samples[i - 1]) /
                         (t_samples[i + 1] - t_samples[i - 1]);
        if (d < 0.0 && eps_samples[i] > 0.0) {
            lt.push_back(t_samples[i]);
            le.push_back(std::log(eps_samples[i]));
            ld.push_back(std::log(-d));
        }
    }
    if (le.size() < 8) return fit;

    // trailing window of `window_decades` decades of eps decay
    const double cut = le.back() + window_decades * std::log(10.0);
    std::size_t start = 0;
    while (start < le.size() && le[start] > cut) ++start;
    if (le.size() - start < 8) start = le.size() >= 8 ? le.size() - 8 : 0;
    const std::size_t m = le.size() - start;
    fit.decade_span = (le[start] - le.back()) / std::log(10.0);
    if (fit.decade_span < window_decades * 0.5 && fit.decade_span < 1.0) return fit;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < le.size(); ++i) {
        sx += le[i];
        sy += ld[i];
        sxx += le[i] * le[i];
        sxy += le[i] * ld[i];
    }
    const double dm = static_cast<double>(m);
    const double denom = dm * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double beta = (dm * sxy - sx * sy) / denom;
    const double intercept = (sy - beta * sx) / dm;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / dm;
    for (std::size_t i = start; i < le.size(); ++i) {
        const double p = beta * le[i] + intercept;
        ss_res += (ld[i] - p) * (ld[i] - p);
        ss_tot += (ld[i] - ybar) * (ld[i] - ybar);
    }
    fit.available = true;
    fit.beta_eff = beta;
    fit.C_eff = std::exp(intercept);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window = {lt[start], lt.back()};
    if (beta < 0.98) {
        const double e_last = eps_samples[n - 1];
        fit.Ts = t_samples[n - 1] +
                 std::pow(e_last, 1.0 - beta) / (fit.C_eff * (1.0 - beta));
    }
    return fit;
}

RunResult run(const RunSetup& setup, const StepControl& control) {
    const auto t_wall0 = std::chrono::steady_clock::now();
    const LagrangianGrid& grid = *setup.grid;
    const Forcing& forcing = *setup.forcing;
    const std::size_t n = grid.size();
    const auto& K = kernels::ops();

    RunResult res;
    FlowState state;
    state.t = 0.0;
    state.phi.assign(n, forcing.eps0);
    state.Phi = cumulative_phi(grid, state.phi);
    const double Phia0 = state.Phi.back();
    const double g0 = forcing.g0();

    Dopri5 stepper(grid, forcing);
    stepper.set_rtol(control.rk_tolerance);
    stepper.prime(state.phi);

    std::optional<BarrierMonitor> barrier;
    if (setup.constants) {
        barrier.emplace(grid, *setup.constants);
        res.certified.emplace();
    }

    res.eps_history.append(0.0, state.eps());
    res.snapshots.push_back({0.0, state.phi, state.Phi});

    auto record_snapshot = [&](const FlowState& s) {
        res.snapshots.push_back({s.t, s.phi, s.Phi});
    };

    auto fail = [&](std::string kind, double t, std::string detail) {
        res.violations.push_back({std::move(kind), t, std::move(detail)});
        res.outcome = RunOutcome::invariant_violation;
    };

    auto check_certified = [&](const FlowState& s, double eps_t_analytic) {
        const auto m = barrier->evaluate(s, res.eps_history, eps_t_analytic);
        auto& summary = *res.certified;
        summary.bootstrap.update(m.bootstrap_margin, m.t);
        summary.eta_bound.update(m.eta_bound_margin, m.t);
        summary.outer_bound.update(m.outer_bound_margin, m.t);
        if (m.rate_margin) summary.rate.update(*m.rate_margin, m.rate_margin_t);
        ++summary.steps_checked;
        if (m.bootstrap_margin < -barrier_margin_tolerance)
            fail("bootstrap-margin", m.t, "barrier phi <= kappa eps violated on [0, l]");
        else if (m.eta_bound_margin < -barrier_margin_tolerance)
            fail("eta-bound-margin", m.t, "inner-zone eta exceeded its exponential bound");
        else if (m.outer_bound_margin < -barrier_margin_tolerance)
            fail("outer-bound-margin", m.t, "phi exceeded kappa x^(1/beta) beyond l");
        else if (m.rate_margin && *m.rate_margin < -barrier_margin_tolerance)
            fail("rate-margin", m.rate_margin_t, "-eps_t fell below its certified lower bound");
        return res.outcome != RunOutcome::invariant_violation;
    };

    if (barrier) {
        check_certified(state, stepper.first_stage()[0]); // k1[0] = eps * I(0)
    }

    std::vector<double> y_new(n), Phi_new(n), I_new(n);
    double dt_suggest = control.dt_max;
    bool aborted = res.outcome == RunOutcome::invariant_violation;
    bool stall_reported = false;
    std::size_t accepted_since_snapshot = 0;

    while (!aborted && state.eps() > control.eps_stop && state.t < control.t_max) {
        bool stalled = false;
        double dt = adapt_dt(state, stepper.first_stage(), control, dt_suggest, &stalled);
        dt = std::min(dt, control.t_max - state.t);
        if (stalled && !stall_reported) {
            res.violations.push_back({"dt-stall", state.t, "step controller hit its floor"});
            stall_reported = true;
        }

        const auto att = stepper.attempt(state.phi, dt, y_new, Phi_new, I_new);
        const bool eps_ok = att.positive && (g0 <= 0.0 || y_new[0] < state.phi[0]);
        if (!att.positive || att.err_norm > 1.0 || !eps_ok) {
            ++res.timing.steps_rejected;
            if (!att.positive || (att.err_norm <= 1.0 && !eps_ok)) {
                dt_suggest = 0.5 * dt;
            } else {
                dt_suggest = dt * controller_factor(att.err_norm); // < dt for err_norm > 1
            }
            if (dt_suggest <= dt_floor(state.t)) {
                fail("step-collapse", state.t, "rejected step at the dt floor");
                aborted = true;
            }
            continue;
        }

        // accept
        stepper.accept();
        const double t_new = state.t + dt;
        ++res.timing.steps_accepted;

        // universal invariants
        const double eps_new = y_new[0];
        const double min_eta = K.vmin(y_new.data(), n) / eps_new;
        const double mono = K.mono_rel_min(y_new.data(), n);
        const double tgrow = K.max_rel_increase(y_new.data(), state.phi.data(), n);
        res.universal.min_eta = std::min(res.universal.min_eta, min_eta);
        res.universal.worst_monotonicity = std::min(res.universal.worst_monotonicity, mono);
        res.universal.worst_time_increase = std::max(res.universal.worst_time_increase, tgrow);
        if (g0 > 0.0 && !(eps_new < state.eps())) res.universal.eps_strictly_decreasing = false;

        if (min_eta < 1.0 - 1e-10) {
            fail("eta-lower-bound", t_new, "min phi/eps fell below 1 - 1e-10");
        } else if (mono < -1e-12) {
            fail("x-monotonicity", t_new, "phi not nondecreasing in x within 1e-12");
        } else if (tgrow > 1e-12) {
            fail("t-monotonicity", t_new, "phi grew in time at a node beyond 1e-12");
        } else if (g0 > 0.0 && !(eps_new < state.eps())) {
            fail("eps-decrease", t_new, "eps did not strictly decrease");
        }

        state.t = t_new;
        state.phi.swap(y_new);
        state.Phi.swap(Phi_new);
        res.eps_history.append(state.t, state.eps());

        const double drift = std::fabs(state.Phi.back() - (Phia0 - g0 * state.t));
        if (drift > res.universal.max_drift_residual) {
            res.universal.max_drift_residual = drift;
            res.universal.drift_residual_t = state.t;
        }

        if (barrier && res.outcome != RunOutcome::invariant_violation) {
            check_certified(state, state.eps() * I_new[0]);
        }

        if (res.outcome == RunOutcome::invariant_violation) {
            aborted = true;
        }

        if (++accepted_since_snapshot >= static_cast<std::size_t>(setup.snapshot_stride)) {
            record_snapshot(state);
            accepted_since_snapshot = 0;
        }
        dt_suggest = dt * controller_factor(att.err_norm);
    }

    if (res.snapshots.back().t != state.t) record_snapshot(state);
    res.final_state = std::move(state);

    // final rate-margin entry for the last sample (backward difference)
    if (barrier && res.eps_history.size() >= 2 && res.certified) {
        const std::size_t last = res.eps_history.size() - 1;
        const double et = res.eps_history.eps_t(last);
        const auto& c = *setup.constants;
        const double margin = (-et) - (c.eps0 * c.eps0 * c.K0 * c.c_beta / (2.0 * c.kappa)) *
                                          std::pow(res.eps_history.eps(last), c.beta);
        res.certified->rate.update(margin, res.eps_history.t(last));
        if (margin < -barrier_margin_tolerance && res.outcome != RunOutcome::invariant_violation) {
            fail("rate-margin", res.eps_history.t(last),
                 "-eps_t fell below its certified lower bound");
        }
    }

    res.blowup.t_stop = res.final_state.t;
    res.blowup.eps_at_stop = res.final_state.eps();
    if (res.outcome != RunOutcome::invariant_violation) {
        if (res.final_state.eps() <= control.eps_stop) {
            res.outcome = RunOutcome::blowup;
            res.blowup.detected = true;
            const auto fit = extrapolate_Ts(res.eps_history.times(), res.eps_history.values());
            if (fit.available) {
                res.blowup.beta_eff = fit.beta_eff;
                res.blowup.C_eff = fit.C_eff;
                res.blowup.fit_r2 = fit.r2;
                res.blowup.decade_span = fit.decade_span;
                res.blowup.fit_window = fit.window;
                res.blowup.Ts_estimate = fit.Ts;
            }
        } else {
            res.outcome = RunOutcome::no_blowup_within_horizon;
        }
    }

    res.timing.rhs_evals = stepper.rhs_evals;
    res.timing.completed = res.outcome != RunOutcome::invariant_violation;
    res.timing.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_wall0).count();
    return res;
}

} // namespace cuspflow
