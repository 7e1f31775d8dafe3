#include "cuspflow/analysis.hpp"

#include "cuspflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cuspflow {
namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
    std::size_t n = 0;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
    LineFit f;
    f.n = xs.size();
    if (f.n < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double dn = static_cast<double>(f.n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) return f;
    f.slope = (dn * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / dn;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / dn;
    for (std::size_t i = 0; i < f.n; ++i) {
        const double p = f.slope * xs[i] + f.intercept;
        ss_res += (ys[i] - p) * (ys[i] - p);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

double EulerianProfile::theta_at(double yq) const {
    if (yq <= y.front()) return theta.front();
    if (yq >= y.back()) return theta.back();
    const auto i = static_cast<std::size_t>(
        std::upper_bound(y.begin(), y.end(), yq) - y.begin());
    const double w = (yq - y[i - 1]) / (y[i] - y[i - 1]);
    return theta[i - 1] + w * (theta[i] - theta[i - 1]);
}

EulerianProfile reconstruct_theta(const LagrangianGrid& grid, const FlowState& state,
                                  const Forcing& forcing) {
    const std::size_t n = grid.size();
    EulerianProfile p;
    p.t = state.t;
    p.theta0 = forcing.g0();
    p.y.assign(state.Phi.begin(), state.Phi.end());
    p.theta.resize(n);
    p.drop.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.theta[i] = forcing.g(grid.x[i]);
        p.drop[i] = forcing.g_drop(grid.x[i]);
    }
    const double xu = std::min(1.0, grid.a());
    const auto i = static_cast<std::size_t>(
        std::upper_bound(grid.x.begin(), grid.x.end(), xu) - grid.x.begin());
    if (i >= n) {
        p.y_at_unit_label = p.y.back();
    } else {
        const double w = (xu - grid.x[i - 1]) / (grid.x[i] - grid.x[i - 1]);
        p.y_at_unit_label = p.y[i - 1] + w * (p.y[i] - p.y[i - 1]);
    }
    return p;
}

CuspFit fit_cusp_exponent(const EulerianProfile& profile, const WindowPolicy& policy) {
    CuspFit fit;
    const std::size_t n = profile.y.size();

    // usable nodes: strictly positive y and gap, both increasing
    std::vector<double> ly, lg;
    ly.reserve(n);
    lg.reserve(n);
    for (std::size_t i = 1; i < n; ++i) {
        if (profile.y[i] > 0.0 && profile.drop[i] > 0.0 &&
            (ly.empty() || (std::log(profile.y[i]) > ly.back() &&
                            std::log(profile.drop[i]) >= lg.back()))) {
            ly.push_back(std::log(profile.y[i]));
            lg.push_back(std::log(profile.drop[i]));
        }
    }
    if (ly.size() < 2) return fit;

    std::size_t i0 = 0, i1 = ly.size() - 1;
    if (policy.kind == WindowPolicy::Kind::auto_slope) {
        // longest contiguous run of local slope inside the sub-linear band
        std::size_t best_lo = 0, best_hi = 0, cur_lo = 0;
        bool in_run = false;
        for (std::size_t j = 0; j + 1 < ly.size(); ++j) {
            const double s = (lg[j + 1] - lg[j]) / (ly[j + 1] - ly[j]);
            const bool ok = s > 0.05 && s < 0.95;
            if (ok && !in_run) {
                cur_lo = j;
                in_run = true;
            }
            if ((!ok || j + 2 == ly.size()) && in_run) {
                const std::size_t hi = ok ? j + 1 : j;
                if (hi - cur_lo > best_hi - best_lo) {
                    best_lo = cur_lo;
                    best_hi = hi;
                }
                in_run = false;
            }
        }
        if (best_hi == best_lo) return fit;
        i0 = best_lo;
        i1 = best_hi;
    } else {
        double lo, hi;
        if (policy.kind == WindowPolicy::Kind::static_range) {
            lo = 10.0 * std::exp(ly.front());
            hi = profile.y_at_unit_label / 10.0;
        } else {
            lo = policy.y_lo;
            hi = policy.y_hi;
        }
        if (!(lo > 0.0) || !(hi > lo)) return fit;
        const double llo = std::log(lo), lhi = std::log(hi);
        while (i0 < ly.size() && ly[i0] < llo) ++i0;
        while (i1 > 0 && ly[i1] > lhi) --i1;
        if (i0 >= i1) return fit;
    }

    const std::span<const double> xs(ly.data() + i0, i1 - i0 + 1);
    const std::span<const double> ys(lg.data() + i0, i1 - i0 + 1);
    const auto line = least_squares(xs, ys);
    fit.n_nodes = line.n;
    fit.y_lo = std::exp(ly[i0]);
    fit.y_hi = std::exp(ly[i1]);
    fit.decade_span = (ly[i1] - ly[i0]) / std::log(10.0);
    if (fit.n_nodes < 12 || fit.decade_span < 1.0) {
        fit.available = false;
        return fit;
    }
    fit.available = true;
    fit.nu_fit = line.slope;
    fit.c_fit = std::exp(line.intercept);
    fit.r2 = line.r2;
    fit.low_confidence = fit.n_nodes < 12 || fit.decade_span < 2.0;
    return fit;
}

CuspSlack verify_cusp_bound(const EulerianProfile& profile, const CuspBound& bound) {
    CuspSlack s;
    s.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.y.size(); ++i) {
        const double y = profile.y[i];
        if (y > bound.y_range_hint) break;
        const double slack = profile.drop[i] - bound.c * std::pow(y, bound.nu);
        ++s.n_checked;
        if (slack < s.min_slack) {
            s.min_slack = slack;
            s.argmin_y = y;
        }
    }
    if (s.n_checked == 0) {
        s.min_slack = 0.0;
    }
    return s;
}

std::string_view needle_flag_name(NeedleDiagnostic::Flag f) {
    switch (f) {
    case NeedleDiagnostic::Flag::cusp_like: return "cusp-like";
    case NeedleDiagnostic::Flag::needle_suspected: return "needle-suspected";
    case NeedleDiagnostic::Flag::inconclusive: return "inconclusive";
    }
    return "?";
}

NeedleDiagnostic needle_diagnostic(const std::vector<Snapshot>& snapshots,
                                   const LagrangianGrid& grid, const Forcing& forcing,
                                   const BlowupReport& report, const NeedleOptions& opts) {
    NeedleDiagnostic d;
    if (snapshots.empty()) {
        d.flag = NeedleDiagnostic::Flag::inconclusive;
        return d;
    }
    const std::size_t n = grid.size();
    const auto& last = snapshots.back();
    d.theta_gap = forcing.g_drop(grid.x[1]);

    const double threshold =
        opts.phi_threshold > 0.0 ? opts.phi_threshold : 0.01 * last.phi[0];
    const double gap_tol =
        opts.gap_tolerance > 0.0 ? opts.gap_tolerance : 1e-6 * forcing.g0();

    const std::size_t m0 =
        snapshots.size() > opts.max_trailing_snapshots
            ? snapshots.size() - opts.max_trailing_snapshots
            : 0;
    const std::size_t m = snapshots.size() - m0;

    double s0 = 0.0;
    std::size_t fitted = 0, poor = 0;
    const bool have_ts = report.detected && report.Ts_estimate.has_value();
    const double t_last = last.t;
    const double remaining = have_ts ? std::max(0.0, *report.Ts_estimate - t_last) : 0.0;

    std::vector<double> ts(m), vs(m);
    for (std::size_t k = 0; k < m; ++k) ts[k] = snapshots[m0 + k].t;

    for (std::size_t i = 0; i < n; ++i) {
        const double v_last = last.phi[i];
        double extrapolated = v_last;
        if (have_ts && m >= 4) {
            for (std::size_t k = 0; k < m; ++k) vs[k] = snapshots[m0 + k].phi[i];
            if (vs.front() > 1.1 * v_last) { // enough decay to calibrate a rate law
                std::vector<double> le, ld;
                for (std::size_t k = 1; k + 1 < m; ++k) {
                    const double dv = (vs[k + 1] - vs[k - 1]) / (ts[k + 1] - ts[k - 1]);
                    if (dv < 0.0) {
                        le.push_back(std::log(vs[k]));
                        ld.push_back(std::log(-dv));
                    }
                }
                if (le.size() >= 3) {
                    const auto f = least_squares(le, ld);
                    ++fitted;
                    if (f.r2 < opts.min_r2) ++poor;
                    const double beta_i = f.slope;
                    const double c_i = std::exp(f.intercept);
                    if (beta_i < 0.98) {
                        const double pw = std::pow(v_last, 1.0 - beta_i) -
                                          c_i * (1.0 - beta_i) * remaining;
                        extrapolated = pw > 0.0 ? std::pow(pw, 1.0 / (1.0 - beta_i)) : 0.0;
                    } else {
                        // near-exponential local decay: finite remaining factor
                        extrapolated = v_last * std::exp(-c_i * std::pow(v_last, beta_i - 1.0) *
                                                         remaining);
                    }
                }
            }
        }
        if (extrapolated < threshold) s0 = grid.x[i];
    }

    d.s0_estimate = s0;
    d.fit_quality = fitted ? 1.0 - static_cast<double>(poor) / static_cast<double>(fitted) : 1.0;
    if (fitted && static_cast<double>(poor) >
                      opts.max_poor_fraction * static_cast<double>(fitted)) {
        d.flag = NeedleDiagnostic::Flag::inconclusive;
    } else if (s0 > grid.x[2] && d.theta_gap > gap_tol) {
        d.flag = NeedleDiagnostic::Flag::needle_suspected;
    } else {
        d.flag = NeedleDiagnostic::Flag::cusp_like;
    }
    return d;
}

} // namespace cuspflow
