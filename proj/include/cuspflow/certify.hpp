#pragma once

#include "cuspflow/flowfield.hpp"
#include "cuspflow/grid.hpp"

#include <optional>
#include <vector>

namespace cuspflow {

struct ConditionMargins {
    double cond1 = 0.0; // kappa eps0^(1/beta) - eps0
    double cond2 = 0.0; // 1/2 - eps0^(1-beta)
    double cond3 = 0.0; // log(kappa)/kappa - 2 K1 / (K0 c_beta beta)
    bool all_positive() const { return cond1 > 0.0 && cond2 > 0.0 && cond3 > 0.0; }
};

/// Constants under which every monitored bound is a theorem: barrier factor
/// kappa > 2, exponent beta in (0,1), scale eps0 picked so the three
/// smallness conditions hold, plus the derived c_beta and cusp exponent nu.
struct CertifiedConstants {
    double beta = 0.0;
    double kappa = 0.0;
    double eps0 = 0.0;
    double c_beta = 0.0; // beta (beta+1) / ((2 beta+1)(1-beta))
    double nu = 0.0;     // 2 beta / (beta+1)
    double K0 = 0.0;
    double K1 = 0.0;
    ConditionMargins margins;
};

struct SelectOptions {
    double kappa = 2.718281828459045; // maximizes log(kappa)/kappa, and > 2
    double condition3_margin = 0.05;  // required slack on condition 3
};

/// Fixes kappa, sweeps beta upward from 0.7 until condition 3 holds with the
/// requested margin (and log kappa > log 2 / beta), then places log eps0 at
/// the midpoint of its feasible interval. Throws infeasible_error when no
/// beta < 1 - 1e-3 works.
CertifiedConstants select_constants(double K0, double K1, const SelectOptions& opts = {});

ConditionMargins check_three_conditions(const CertifiedConstants& c);

double c_beta_of(double beta);
double nu_of(double beta);

/// (t, eps) samples along the run plus the running trapezoid integral of
/// 1/eps in t; owned by the run loop, read by the monitors.
class EpsHistory {
  public:
    void append(double t, double eps);
    std::size_t size() const { return ts_.size(); }
    double t(std::size_t i) const { return ts_[i]; }
    double eps(std::size_t i) const { return eps_[i]; }
    double inv_integral() const { return inv_int_.empty() ? 0.0 : inv_int_.back(); }
    /// d(eps)/dt by centered difference at sample i (one-sided at the ends);
    /// 0 with fewer than two samples.
    double eps_t(std::size_t i) const;
    double eps_t_latest() const { return size() ? eps_t(size() - 1) : 0.0; }
    std::span<const double> times() const { return ts_; }
    std::span<const double> values() const { return eps_; }

  private:
    std::vector<double> ts_, eps_, inv_int_;
};

/// Per-step slacks of the proved bounds; nonnegative while the theorems hold.
struct MonitorReport {
    double t = 0.0;
    double l_t = 0.0;               // eps^beta
    double bootstrap_margin = 0.0;  // kappa eps - max phi on [0, l]
    double eta_bound_margin = 0.0;  // exp(eps0^2 K1 l int 1/eps) - max eta on [0, l]
    double outer_bound_margin = 0.0; // min over x >= l of kappa x^(1/beta) - phi
    // (-eps_t) - (eps0^2 K0 c_beta / 2 kappa) eps^beta, with eps_t by centered
    // differences; refers to the newest sample with a complete stencil, at
    // time rate_margin_t (one step behind the state until the run ends).
    std::optional<double> rate_margin;
    double rate_margin_t = 0.0;
    double eps_t_fd = 0.0;
    double eps_t_analytic = 0.0; // eps * I(0), supplied by the run loop
};

/// Precomputes kappa x^(1/beta) per node; evaluate() prices all margins for
/// one state. The inner-zone checks cover the nodes with x <= l(t) plus the
/// linearly interpolated value at l itself (the grid check is conservative
/// about the continuum barrier).
class BarrierMonitor {
  public:
    BarrierMonitor(const LagrangianGrid& grid, const CertifiedConstants& c);
    MonitorReport evaluate(const FlowState& state, const EpsHistory& history,
                           double eps_t_analytic = 0.0) const;

  private:
    const LagrangianGrid& grid_;
    CertifiedConstants c_;
    std::vector<double> kappa_x_pow_;
};

MonitorReport monitor(const LagrangianGrid& grid, const FlowState& state,
                      const EpsHistory& history, const CertifiedConstants& c);

/// Cusp envelope at the singular time: theta(y, Ts) <= theta0(0) - c y^nu for
/// y up to the hint range (the computed Phi at the unit label).
struct CuspBound {
    double c = 0.0;
    double nu = 0.0;
    double y_range_hint = 0.0;
};

CuspBound cusp_bound_constant(const CertifiedConstants& c, const LagrangianGrid& grid,
                              const FlowState& final_state);

} // namespace cuspflow
