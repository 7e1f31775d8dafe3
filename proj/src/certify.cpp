#include "cuspflow/certify.hpp"

#include "cuspflow/errors.hpp"
#include "cuspflow/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cuspflow {

double c_beta_of(double beta) {
    return beta * (beta + 1.0) / ((2.0 * beta + 1.0) * (1.0 - beta));
}

double nu_of(double beta) {
    return 2.0 * beta / (beta + 1.0);
}

ConditionMargins check_three_conditions(const CertifiedConstants& c) {
    ConditionMargins m;
    m.cond1 = c.kappa * std::pow(c.eps0, 1.0 / c.beta) - c.eps0;
    m.cond2 = 0.5 - std::pow(c.eps0, 1.0 - c.beta);
    m.cond3 = std::log(c.kappa) / c.kappa - 2.0 * c.K1 / (c.K0 * c.c_beta * c.beta);
    return m;
}

namespace {

CertifiedConstants assemble(double beta, double kappa, double eps0, double K0, double K1) {
    CertifiedConstants c;
    c.beta = beta;
    c.kappa = kappa;
    c.eps0 = eps0;
    c.c_beta = c_beta_of(beta);
    c.nu = nu_of(beta);
    c.K0 = K0;
    c.K1 = K1;
    c.margins = check_three_conditions(c);
    return c;
}

} // namespace

CertifiedConstants select_constants(double K0, double K1, const SelectOptions& opts) {
    if (!(K0 > 0.0) || !(K0 < K1)) {
        throw infeasible_error("select_constants requires 0 < K0 < K1");
    }
    if (!(opts.kappa > 2.0)) {
        throw infeasible_error("select_constants requires kappa > 2");
    }
    const double kappa = opts.kappa;
    const double target = std::log(kappa) / kappa;

    auto feasible = [&](double beta) {
        const double lhs = 2.0 * K1 / (K0 * c_beta_of(beta) * beta);
        return std::log(kappa) > std::log(2.0) / beta &&
               target - lhs >= opts.condition3_margin;
    };

    double beta = -1.0;
    for (double b = 0.70; b <= 0.951; b += 0.05) { // coarse sweep
        if (feasible(b)) {
            beta = b;
            break;
        }
    }
    if (beta < 0.0) {
        for (double b = 0.955; b < 1.0 - 1e-3; b += 0.005) { // fine sweep near 1
            if (feasible(b)) {
                beta = b;
                break;
            }
        }
    }
    if (beta < 0.0) {
        throw infeasible_error("no beta < 1 - 1e-3 satisfies condition 3 with the requested "
                               "margin (K1/K0 ratio too extreme)");
    }

    // log eps0 at the midpoint of [-beta log kappa/(1-beta), -log 2/(1-beta)]
    const double lo = -beta / (1.0 - beta) * std::log(kappa);
    const double hi = -std::log(2.0) / (1.0 - beta);
    const double eps0 = std::exp(0.5 * (lo + hi));

    CertifiedConstants c = assemble(beta, kappa, eps0, K0, K1);
    if (!c.margins.all_positive()) {
        throw infeasible_error("selected constants fail their own condition re-verification");
    }
    return c;
}

void EpsHistory::append(double t, double eps) {
    if (!ts_.empty()) {
        const double dt = t - ts_.back();
        inv_int_.push_back(inv_int_.back() + 0.5 * dt * (1.0 / eps + 1.0 / eps_.back()));
    } else {
        inv_int_.push_back(0.0);
    }
    ts_.push_back(t);
    eps_.push_back(eps);
}

double EpsHistory::eps_t(std::size_t i) const {
    const std::size_t n = ts_.size();
    if (n < 2) return 0.0;
    if (i == 0) return (eps_[1] - eps_[0]) / (ts_[1] - ts_[0]);
    if (i + 1 >= n) return (eps_[n - 1] - eps_[n - 2]) / (ts_[n - 1] - ts_[n - 2]);
    return (eps_[i + 1] - eps_[i - 1]) / (ts_[i + 1] - ts_[i - 1]);
}

BarrierMonitor::BarrierMonitor(const LagrangianGrid& grid, const CertifiedConstants& c)
    : grid_(grid), c_(c) {
    kappa_x_pow_.resize(grid.size());
    kappa_x_pow_[0] = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        kappa_x_pow_[i] = c_.kappa * std::pow(grid.x[i], 1.0 / c_.beta);
    }
}

MonitorReport BarrierMonitor::evaluate(const FlowState& state, const EpsHistory& history,
                                       double eps_t_analytic) const {
    const auto& x = grid_.x;
    const std::size_t n = x.size();
    const double eps = state.eps();
    MonitorReport r;
    r.t = state.t;
    r.l_t = std::pow(eps, c_.beta);
    r.eps_t_analytic = eps_t_analytic;

    // inner zone [0, l]: covered nodes plus the interpolated barrier endpoint
    const auto il = static_cast<std::size_t>(
        std::upper_bound(x.begin(), x.end(), r.l_t) - x.begin()); // first node > l
    double inner_max = state.phi[0];
    for (std::size_t i = 1; i < il && i < n; ++i) inner_max = std::max(inner_max, state.phi[i]);
    if (il < n && il >= 1) {
        const double w = (r.l_t - x[il - 1]) / (x[il] - x[il - 1]);
        inner_max = std::max(inner_max,
                             state.phi[il - 1] + w * (state.phi[il] - state.phi[il - 1]));
    }
    r.bootstrap_margin = c_.kappa * eps - inner_max;

    const double bound =
        std::exp(c_.eps0 * c_.eps0 * c_.K1 * r.l_t * history.inv_integral());
    r.eta_bound_margin = bound - inner_max / eps;

    // outer zone: nodes with x >= l
    const auto io = static_cast<std::size_t>(
        std::lower_bound(x.begin(), x.end(), r.l_t) - x.begin());
    if (io < n) {
        r.outer_bound_margin = kernels::ops().min_diff(kappa_x_pow_.data() + io,
                                                       state.phi.data() + io, n - io);
    } else {
        r.outer_bound_margin = 0.0;
    }

    if (history.size() >= 2) {
        const std::size_t j = history.size() - 2; // newest sample with a centered stencil
        r.eps_t_fd = history.eps_t(j);
        r.rate_margin_t = history.t(j);
        r.rate_margin = (-r.eps_t_fd) -
                        (c_.eps0 * c_.eps0 * c_.K0 * c_.c_beta / (2.0 * c_.kappa)) *
                            std::pow(history.eps(j), c_.beta);
    }
    return r;
}

MonitorReport monitor(const LagrangianGrid& grid, const FlowState& state,
                      const EpsHistory& history, const CertifiedConstants& c) {
    return BarrierMonitor(grid, c).evaluate(state, history);
}

CuspBound cusp_bound_constant(const CertifiedConstants& c, const LagrangianGrid& grid,
                              const FlowState& final_state) {
    CuspBound b;
    b.nu = c.nu;
    b.c = 0.5 * c.eps0 * c.eps0 * c.K0 *
          std::pow((c.beta + 1.0) / (c.kappa * c.beta), c.nu);
    // hint: Phi at the unit label (or at a when the support is shorter)
    const double xu = std::min(1.0, grid.a());
    const auto& x = grid.x;
    const auto i = static_cast<std::size_t>(
        std::upper_bound(x.begin(), x.end(), xu) - x.begin());
    if (i >= x.size()) {
        b.y_range_hint = final_state.Phi.back();
    } else {
        const double w = (xu - x[i - 1]) / (x[i] - x[i - 1]);
        b.y_range_hint =
            final_state.Phi[i - 1] + w * (final_state.Phi[i] - final_state.Phi[i - 1]);
    }
    return b;
}

} // namespace cuspflow
