#pragma once

#include "cuspflow/certify.hpp"
#include "cuspflow/flowfield.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/integrator.hpp"
#include "cuspflow/profile.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace cuspflow {

/// theta(y, t) = g(Phi^{-1}(y, t)) realized by node pairing: y_i = Phi(x_i),
/// theta_i = g(x_i). `drop` holds theta0(0) - theta computed cancellation-free
/// (the cusp fit works on gaps far below double-precision of theta itself).
struct EulerianProfile {
    double t = 0.0;
    std::vector<double> y;
    std::vector<double> theta;
    std::vector<double> drop;
    double theta0 = 0.0;
    double y_at_unit_label = 0.0; // Phi(min(1, a), t)
    /// monotone piecewise-linear interpolant
    double theta_at(double yq) const;
};

EulerianProfile reconstruct_theta(const LagrangianGrid& grid, const FlowState& state,
                                  const Forcing& forcing);

struct WindowPolicy {
    enum class Kind {
        auto_slope,    // longest contiguous run of local log-log slope in (0.05, 0.95)
        static_range,  // [10 * y_first_positive, Phi(min(1,a), t) / 10]
        explicit_range // [y_lo, y_hi] as given
    };
    Kind kind = Kind::auto_slope;
    double y_lo = 0.0, y_hi = 0.0;
};

struct CuspFit {
    bool available = false;
    std::optional<double> nu_fit;
    std::optional<double> c_fit;
    double y_lo = 0.0, y_hi = 0.0;
    double r2 = 0.0;
    double decade_span = 0.0;
    std::size_t n_nodes = 0;
    bool low_confidence = true; // cleared when >= 12 nodes span >= 2 decades
};

/// Least-squares line on (log y, log(theta0 - theta)) over the window;
/// the conjectured singular exponent 1/2 is a reporting reference, never
/// asserted.
inline constexpr double conjectured_cusp_exponent = 0.5;
CuspFit fit_cusp_exponent(const EulerianProfile& profile, const WindowPolicy& policy = {});

struct CuspSlack {
    double min_slack = 0.0;
    double argmin_y = 0.0;
    std::size_t n_checked = 0;
};

/// slack(y) = theta0(0) - c y^nu - theta(y) at all nodes with y <= hint;
/// negative slack is a reported finding, not an error.
CuspSlack verify_cusp_bound(const EulerianProfile& profile, const CuspBound& bound);

struct NeedleOptions {
    double phi_threshold = 0.0;  // 0: derive as 0.01 * eps_at_stop
    double gap_tolerance = 0.0;  // 0: derive as 1e-6 * theta0(0)
    std::size_t max_trailing_snapshots = 12;
    double min_r2 = 0.9;
    double max_poor_fraction = 0.2;
};

struct NeedleDiagnostic {
    enum class Flag { cusp_like, needle_suspected, inconclusive };
    double s0_estimate = 0.0;
    double theta_gap = 0.0;
    Flag flag = Flag::cusp_like;
    double fit_quality = 1.0; // fraction of decaying nodes with a good rate fit
};

std::string_view needle_flag_name(NeedleDiagnostic::Flag f);

/// Extrapolates phi(x_i, .) to Ts per node with the same rate-law form used
/// for eps; s0_estimate is the largest label whose extrapolated value falls
/// below the threshold, and theta_gap the observed drop at the first positive
/// image node. The paper-side question stays open: this reports, it never
/// decides.
NeedleDiagnostic needle_diagnostic(const std::vector<Snapshot>& snapshots,
                                   const LagrangianGrid& grid, const Forcing& forcing,
                                   const BlowupReport& report,
                                   const NeedleOptions& opts = {});

} // namespace cuspflow
