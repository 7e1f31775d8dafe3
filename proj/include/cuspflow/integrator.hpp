#pragma once

#include "cuspflow/certify.hpp"
#include "cuspflow/flowfield.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/profile.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cuspflow {

struct StepControl {
    double safety = 0.05;        // max relative drop of eps per step
    double dt_max = 0.1;
    double eps_stop = 1e-12;     // absolute stopping threshold for eps
    double t_max = 10.0;
    double rk_tolerance = 1e-10; // relative local-error target of the embedded pair
};

/// Default stopping threshold: max(1e-12, 1e-6 eps0). Below it the quadrature
/// near x = 0 is round-off dominated.
double default_eps_stop(double eps0);

struct BlowupReport {
    double t_stop = 0.0;
    double eps_at_stop = 0.0;
    bool detected = false;
    std::optional<double> Ts_estimate;
    std::optional<double> beta_eff;
    std::optional<double> C_eff;
    std::optional<double> fit_r2;
    std::optional<double> decade_span;
    std::optional<std::pair<double, double>> fit_window; // time interval used
};

struct TsFit {
    bool available = false;
    std::optional<double> Ts;
    double beta_eff = 0.0;
    double C_eff = 0.0;
    double r2 = 0.0;
    double decade_span = 0.0;
    std::pair<double, double> window{0.0, 0.0};
};

/// Rate-law regression: log(-deps/dt) on log(eps) over the trailing window of
/// `window_decades` decades of decay (finite-difference derivatives), then
/// the closed-form singular time Ts = t_last + eps_last^(1-beta)/(C (1-beta)).
/// Needs >= 8 usable samples spanning >= window_decades; Ts is withheld when
/// beta_eff >= 0.98 (no finite-time vanishing).
TsFit extrapolate_Ts(std::span<const double> t_samples, std::span<const double> eps_samples,
                     double window_decades = 2.0);

/// d(phi)/dt = phi * I on the grid; zero at and beyond x = a.
std::vector<double> rhs(const LagrangianGrid& grid, const FlowState& state,
                        const Forcing& forcing);

/// One embedded Dormand-Prince 5(4) attempt. Returns the advanced state and
/// the scaled local error estimate; throws state_error when positivity fails
/// (the caller rejects and halves dt).
std::pair<FlowState, double> step(const LagrangianGrid& grid, const FlowState& state,
                                  const Forcing& forcing, double dt,
                                  const StepControl& control);

/// dt = min(dt_max, safety*eps/|deps/dt|, embedded-error suggestion); floors
/// at dt_min with `stalled` set when the controller collapses.
double adapt_dt(const FlowState& state, std::span<const double> rhs_values,
                const StepControl& control,
                double embedded_suggestion = std::numeric_limits<double>::infinity(),
                bool* stalled = nullptr);

struct Snapshot {
    double t = 0.0;
    std::vector<double> phi, Phi;
};

struct Violation {
    std::string kind;
    double t = 0.0;
    std::string detail;
};

struct WorstMargin {
    double value = std::numeric_limits<double>::infinity();
    double t = 0.0;
    void update(double v, double at) {
        if (v < value) {
            value = v;
            t = at;
        }
    }
};

struct UniversalMonitor {
    bool eps_strictly_decreasing = true;
    double min_eta = 1.0;                    // min over steps of min_i phi_i/eps
    double worst_monotonicity = 0.0;         // min over steps of min_i relative x-increment
    double worst_time_increase = 0.0;        // max over steps of max_i relative growth in t
    double max_drift_residual = 0.0;         // max |Phi(a,t) - Phi(a,0) + g(0) t|
    double drift_residual_t = 0.0;
};

struct CertifiedMonitorSummary {
    WorstMargin bootstrap, eta_bound, outer_bound, rate;
    std::size_t steps_checked = 0;
};

enum class RunOutcome { blowup, no_blowup_within_horizon, invariant_violation };

struct Timing {
    double wall_seconds = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t rhs_evals = 0;
    bool completed = false;
};

struct RunResult {
    RunOutcome outcome = RunOutcome::no_blowup_within_horizon;
    FlowState final_state;
    std::vector<Snapshot> snapshots;
    EpsHistory eps_history;
    BlowupReport blowup;
    UniversalMonitor universal;
    std::optional<CertifiedMonitorSummary> certified;
    std::vector<Violation> violations;
    Timing timing;
};

struct RunSetup {
    const LagrangianGrid* grid = nullptr;
    const Forcing* forcing = nullptr;
    std::optional<CertifiedConstants> constants; // present: certified mode
    int snapshot_stride = 20;
};

/// Advances from phi == eps0 until eps <= eps_stop or t >= t_max, checking
/// the universal invariants (and, in certified mode, the barrier margins)
/// on every accepted step. A hard invariant failure or a barrier margin
/// below -1e-8 aborts with outcome invariant_violation.
RunResult run(const RunSetup& setup, const StepControl& control);

inline constexpr double barrier_margin_tolerance = 1e-8;

} // namespace cuspflow
