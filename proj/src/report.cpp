#include "cuspflow/report.hpp"

#include "cuspflow/errors.hpp"
#include "cuspflow/kernels.hpp"

#include <fstream>

namespace cuspflow {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json constants_json(const CertificateData& c) {
    return {{"beta", c.constants.beta},
            {"kappa", c.constants.kappa},
            {"eps0", c.constants.eps0},
            {"c_beta", c.constants.c_beta},
            {"nu", c.constants.nu},
            {"K0", c.constants.K0},
            {"K1", c.constants.K1},
            {"margins",
             {{"cond1", c.constants.margins.cond1},
              {"cond2", c.constants.margins.cond2},
              {"cond3", c.constants.margins.cond3}}},
            {"k_fit",
             {{"inf", c.k_fit.k0},
              {"sup", c.k_fit.k1},
              {"sample_tolerance", c.k_fit.sample_tolerance}}},
            {"inputs",
             {{"theta_second_at_0", c.theta_second_0},
              {"k_margin", c.k_margin},
              {"condition3_margin", c.condition3_margin}}}};
}

json worst_json(const WorstMargin& w) {
    return {{"worst", w.value}, {"t", w.t}};
}

} // namespace

json certificate_to_json(const CertificateData& cert) {
    json j = constants_json(cert);
    j["all_margins_positive"] = cert.constants.margins.all_positive();
    return j;
}

json report_to_json(const RunReport& r) {
    json j;
    j["config"] = r.config_echo;
    j["constants"] = r.certificate ? constants_json(*r.certificate) : json(nullptr);

    if (r.blowup) {
        const auto& b = *r.blowup;
        json bw = {{"detected", b.detected},
                   {"t_stop", b.t_stop},
                   {"eps_at_stop", b.eps_at_stop},
                   {"Ts_estimate", opt(b.Ts_estimate)},
                   {"beta_eff", opt(b.beta_eff)},
                   {"C_eff", opt(b.C_eff)},
                   {"fit_r2", opt(b.fit_r2)},
                   {"decade_span", opt(b.decade_span)}};
        bw["fit_window"] = b.fit_window
                               ? json::array({b.fit_window->first, b.fit_window->second})
                               : json(nullptr);
        j["blowup"] = bw;
    } else {
        j["blowup"] = nullptr;
    }

    if (r.cusp_fit) {
        const auto& f = *r.cusp_fit;
        json cf = {{"available", f.available},
                   {"nu_fit", opt(f.nu_fit)},
                   {"c_fit", opt(f.c_fit)},
                   {"window", json::array({f.y_lo, f.y_hi})},
                   {"r2", f.r2},
                   {"decade_span", f.decade_span},
                   {"n_nodes", f.n_nodes},
                   {"low_confidence", f.low_confidence},
                   {"reference_nu", conjectured_cusp_exponent}};
        if (r.cusp_bound) {
            cf["bound"] = {{"c", r.cusp_bound->c},
                           {"nu", r.cusp_bound->nu},
                           {"y_range_hint", r.cusp_bound->y_range_hint}};
        }
        if (r.cusp_slack) {
            cf["bound_check"] = {{"min_slack", r.cusp_slack->min_slack},
                                 {"argmin_y", r.cusp_slack->argmin_y},
                                 {"n_checked", r.cusp_slack->n_checked}};
        }
        j["cusp_fit"] = cf;
    } else {
        j["cusp_fit"] = nullptr;
    }

    if (r.needle) {
        j["needle"] = {{"s0_estimate", r.needle->s0_estimate},
                       {"theta_gap", r.needle->theta_gap},
                       {"flag", std::string(needle_flag_name(r.needle->flag))},
                       {"fit_quality", r.needle->fit_quality}};
    } else {
        j["needle"] = nullptr;
    }

    json mon;
    if (r.universal) {
        const auto& u = *r.universal;
        mon["universal"] = {{"eps_strictly_decreasing", u.eps_strictly_decreasing},
                            {"min_eta", u.min_eta},
                            {"worst_x_monotonicity", u.worst_monotonicity},
                            {"worst_time_increase", u.worst_time_increase},
                            {"max_drift_residual", u.max_drift_residual},
                            {"drift_residual_t", u.drift_residual_t}};
    } else {
        mon["universal"] = nullptr;
    }
    if (r.certified_monitors) {
        const auto& c = *r.certified_monitors;
        mon["certified"] = {{"bootstrap", worst_json(c.bootstrap)},
                            {"eta_bound", worst_json(c.eta_bound)},
                            {"outer_bound", worst_json(c.outer_bound)},
                            {"rate", worst_json(c.rate)},
                            {"steps_checked", c.steps_checked}};
    } else {
        mon["certified"] = nullptr;
    }
    j["monitors"] = mon;

    json viols = json::array();
    for (const auto& v : r.violations) {
        viols.push_back({{"kind", v.kind}, {"t", v.t}, {"detail", v.detail}});
    }
    j["violations"] = viols;

    j["timing"] = {{"wall_seconds", r.timing.wall_seconds},
                   {"steps_accepted", r.timing.steps_accepted},
                   {"steps_rejected", r.timing.steps_rejected},
                   {"rhs_evals", r.timing.rhs_evals},
                   {"completed", r.timing.completed},
                   {"exit_code", r.exit_code},
                   {"kernel_backend",
                    std::string(kernels::backend_name(kernels::active()))}};
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

} // namespace cuspflow
