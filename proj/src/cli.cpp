#include "cuspflow/cli.hpp"

#include "cuspflow/analysis.hpp"
#include "cuspflow/errors.hpp"
#include "cuspflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace cuspflow {

namespace fs = std::filesystem;

namespace {

InitialProfile profile_from_config(const RunConfig& c) {
    return build_profile(c.profile.family, c.profile.params, c.profile.R);
}

StepControl control_from_config(const RunConfig& c, double eps0) {
    StepControl ctl;
    ctl.safety = c.control.safety;
    ctl.dt_max = c.control.dt_max;
    ctl.t_max = c.control.t_max;
    ctl.rk_tolerance = c.control.rk_tolerance;
    ctl.eps_stop = c.control.eps_stop.value_or(default_eps_stop(eps0));
    if (!(ctl.eps_stop < eps0)) throw config_error("control.eps_stop: must be below eps0");
    return ctl;
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += "; ";
        s += p;
    }
    return s;
}

} // namespace

CertifyOutcome certify_pipeline(const RunConfig& config, const InitialProfile& profile) {
    CertifyOutcome out;
    const double th2 = profile.theta_second(0.0);
    if (!(th2 < 0.0)) {
        out.failures.push_back("profile: flat maximum (theta0''(0) must be negative)");
        return out;
    }
    const double curvature = -th2;
    const double mk = config.margins.k_bound;
    const double K0 = (1.0 - mk) * curvature;
    const double K1 = (1.0 + mk) * curvature;

    CertifiedConstants constants;
    const auto& ov = config.overrides;
    try {
        SelectOptions opts;
        opts.condition3_margin = config.margins.condition3;
        if (ov && ov->kappa) opts.kappa = *ov->kappa;
        constants = select_constants(K0, K1, opts);
    } catch (const infeasible_error& e) {
        out.failures.push_back(e.what());
        return out;
    }

    if (ov && (ov->beta || ov->eps0)) {
        if (ov->beta) constants.beta = *ov->beta;
        if (ov->eps0) constants.eps0 = *ov->eps0;
        if (!(constants.beta > 0.0 && constants.beta < 1.0)) {
            out.failures.push_back("override.beta: must lie in (0, 1)");
            return out;
        }
        if (!(constants.eps0 > 0.0 && constants.eps0 < 1.0)) {
            out.failures.push_back("override.eps0: must lie in (0, 1)");
            return out;
        }
        constants.c_beta = c_beta_of(constants.beta);
        constants.nu = nu_of(constants.beta);
        constants.margins = check_three_conditions(constants);
    }

    CertificateData cert;
    cert.constants = constants;
    cert.theta_second_0 = th2;
    cert.k_margin = mk;
    cert.condition3_margin = config.margins.condition3;

    if (!(constants.kappa > 2.0)) {
        out.failures.push_back("kappa must exceed 2");
    }
    if (!(constants.margins.cond1 > 0.0)) out.failures.push_back("condition 1 margin not positive");
    if (!(constants.margins.cond2 > 0.0)) out.failures.push_back("condition 2 margin not positive");
    if (!(constants.margins.cond3 > 0.0)) out.failures.push_back("condition 3 margin not positive");

    if (out.failures.empty()) {
        try {
            const Forcing forcing = build_forcing(profile, constants.eps0);
            cert.k_fit = fit_k_bounds(forcing);
            if (cert.k_fit.k0 < constants.K0 || cert.k_fit.k1 > constants.K1) {
                out.failures.push_back("quadratic envelope check failed at the selected eps0");
            }
        } catch (const config_error& e) {
            out.failures.push_back(e.what());
        }
    }

    out.certificate = cert;
    return out;
}

Assembled assemble(const RunConfig& config) {
    Assembled a;
    a.profile = profile_from_config(config);
    if (config.mode == RunMode::certified) {
        auto outcome = certify_pipeline(config, a.profile);
        if (!outcome.failures.empty()) {
            throw config_error("certified-mode gate failed: " + join(outcome.failures));
        }
        a.certificate = std::move(outcome.certificate);
        a.forcing = build_forcing(a.profile, a.certificate->constants.eps0);
    } else {
        a.forcing = build_forcing(a.profile, config.eps0.value_or(1.0));
    }
    a.grid = make_grid(a.forcing.a, config.grid.N, config.grading());
    a.control = control_from_config(config, a.forcing.eps0);
    return a;
}

RunArtifacts run_and_write(const RunConfig& config, const std::string& out_dir) {
    RunArtifacts art;
    art.report.config_echo = config_to_json(config);
    fs::create_directories(out_dir);

    auto flush_report = [&](const char* name = "report.json") {
        art.report.exit_code = art.exit_code;
        write_json_file((fs::path(out_dir) / name).string(), report_to_json(art.report));
    };

    std::optional<Assembled> a;
    try {
        a.emplace(assemble(config));
    } catch (const config_error& e) {
        std::cerr << "config: " << e.what() << "\n";
        art.exit_code = exit_config_error;
        art.report.violations.push_back({"config", 0.0, e.what()});
        flush_report();
        return art;
    }
    art.report.certificate = a->certificate;
    if (a->certificate) {
        write_json_file((fs::path(out_dir) / "certificate.json").string(),
                        certificate_to_json(*a->certificate));
    }

    RunSetup setup;
    setup.grid = &a->grid;
    setup.forcing = &a->forcing;
    if (a->certificate) setup.constants = a->certificate->constants;
    setup.snapshot_stride = config.outputs.snapshot_stride;

    RunResult res;
    try {
        res = run(setup, a->control);
    } catch (const std::exception& e) {
        art.exit_code = exit_invariant_violation;
        art.report.violations.push_back({"aborted", 0.0, e.what()});
        art.report.timing.completed = false;
        flush_report();
        return art;
    }

    art.report.blowup = res.blowup;
    art.report.universal = res.universal;
    art.report.certified_monitors = res.certified;
    art.report.violations = res.violations;
    art.report.timing = res.timing;

    // analysis of the final state
    std::vector<EulerianProfile> profiles;
    profiles.reserve(res.snapshots.size());
    for (const auto& s : res.snapshots) {
        FlowState st{s.t, s.phi, s.Phi};
        profiles.push_back(reconstruct_theta(a->grid, st, a->forcing));
    }
    if (!profiles.empty()) {
        art.report.cusp_fit = fit_cusp_exponent(profiles.back());
        if (a->certificate) {
            const auto bound = cusp_bound_constant(a->certificate->constants, a->grid,
                                                   res.final_state);
            art.report.cusp_bound = bound;
            art.report.cusp_slack = verify_cusp_bound(profiles.back(), bound);
        }
        art.report.needle =
            needle_diagnostic(res.snapshots, a->grid, a->forcing, res.blowup);
    }

    if (config.outputs.write_csv) {
        write_snapshots_csv((fs::path(out_dir) / "snapshots.csv").string(), a->grid,
                            res.snapshots);
        write_theta_csv((fs::path(out_dir) / "theta.csv").string(), profiles);
    }

    switch (res.outcome) {
    case RunOutcome::blowup: art.exit_code = exit_ok; break;
    case RunOutcome::no_blowup_within_horizon: art.exit_code = exit_no_blowup; break;
    case RunOutcome::invariant_violation: art.exit_code = exit_invariant_violation; break;
    }
    flush_report();
    return art;
}

int cmd_run(const RunConfig& config, const std::string& out_dir) {
    return run_and_write(config, out_dir).exit_code;
}

int cmd_certify(const RunConfig& config, const std::string& out_dir) {
    if (config.mode != RunMode::certified) {
        std::cerr << "certify requires mode = \"certified\"\n";
        return exit_config_error;
    }
    InitialProfile profile;
    try {
        profile = profile_from_config(config);
    } catch (const config_error& e) {
        std::cerr << "config: " << e.what() << "\n";
        return exit_config_error;
    }
    const auto outcome = certify_pipeline(config, profile);
    fs::create_directories(out_dir);
    if (outcome.certificate) {
        auto j = certificate_to_json(*outcome.certificate);
        if (!outcome.failures.empty()) j["failures"] = outcome.failures;
        write_json_file((fs::path(out_dir) / "certificate.json").string(), j);
    }
    if (!outcome.failures.empty()) {
        std::cerr << "certify failed: " << join(outcome.failures) << "\n";
        return exit_config_error;
    }
    return exit_ok;
}

int cmd_analyze(const RunConfig& config, const std::string& out_dir) {
    try {
        Assembled a = assemble(config);
        const auto file = read_snapshots_csv((fs::path(out_dir) / "snapshots.csv").string());
        if (file.x.size() != a.grid.size()) {
            throw config_error("snapshots.csv was produced with a different grid size");
        }
        for (std::size_t i = 0; i < file.x.size(); ++i) {
            if (file.x[i] != a.grid.x[i]) {
                throw config_error("snapshots.csv was produced with a different grid");
            }
        }

        std::vector<EulerianProfile> profiles;
        std::vector<double> ts, eps;
        for (const auto& s : file.snapshots) {
            FlowState st{s.t, s.phi, s.Phi};
            profiles.push_back(reconstruct_theta(a.grid, st, a.forcing));
            ts.push_back(s.t);
            eps.push_back(s.phi[0]);
        }
        write_theta_csv((fs::path(out_dir) / "theta.csv").string(), profiles);

        RunReport report;
        report.config_echo = config_to_json(config);
        report.certificate = a.certificate;

        BlowupReport blow;
        blow.t_stop = ts.back();
        blow.eps_at_stop = eps.back();
        blow.detected = eps.back() <= a.control.eps_stop;
        const auto fit = extrapolate_Ts(ts, eps);
        if (fit.available) {
            blow.beta_eff = fit.beta_eff;
            blow.C_eff = fit.C_eff;
            blow.fit_r2 = fit.r2;
            blow.decade_span = fit.decade_span;
            blow.fit_window = fit.window;
            blow.Ts_estimate = fit.Ts;
        }
        report.blowup = blow;
        report.cusp_fit = fit_cusp_exponent(profiles.back());
        if (a.certificate) {
            FlowState final_state{file.snapshots.back().t, file.snapshots.back().phi,
                                  file.snapshots.back().Phi};
            const auto bound =
                cusp_bound_constant(a.certificate->constants, a.grid, final_state);
            report.cusp_bound = bound;
            report.cusp_slack = verify_cusp_bound(profiles.back(), bound);
        }
        report.needle = needle_diagnostic(file.snapshots, a.grid, a.forcing, blow);
        report.timing.completed = true;
        report.exit_code = exit_ok;
        write_json_file((fs::path(out_dir) / "analysis.json").string(),
                        report_to_json(report));
        return exit_ok;
    } catch (const config_error& e) {
        std::cerr << "analyze: " << e.what() << "\n";
        return exit_config_error;
    }
}

namespace {

struct SweepRow {
    double value = 0.0;
    RunArtifacts art;
};

std::string csv_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

RunConfig apply_axis(const RunConfig& base, const std::string& axis, double value) {
    RunConfig c = base;
    if (axis == "N") {
        if (value < 16.0 || value != std::floor(value)) {
            throw config_error("sweep axis N: values must be integers >= 16");
        }
        c.grid.N = static_cast<std::size_t>(value);
    } else if (axis == "eps0") {
        if (c.mode != RunMode::uncertified) {
            throw config_error("sweep axis eps0: requires uncertified mode");
        }
        c.eps0 = value;
    } else if (axis == "beta-margin") {
        c.margins.condition3 = value;
    } else if (axis == "profile-param") {
        if (c.profile.params.empty()) c.profile.params.resize(1);
        c.profile.params[0] = value;
    } else {
        throw config_error("unknown sweep axis: " + axis +
                           " (expected N | eps0 | beta-margin | profile-param)");
    }
    return c;
}

} // namespace

int cmd_sweep(const RunConfig& config, const std::string& axis, std::span<const double> values,
              const std::string& out_dir, int jobs) {
    fs::create_directories(out_dir);
    std::vector<SweepRow> rows(values.size());

    try {
        for (double v : values) (void)apply_axis(config, axis, v); // validate axis up front
    } catch (const config_error& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return exit_config_error;
    }

    auto run_row = [&](std::size_t i) {
        rows[i].value = values[i];
        const RunConfig rowcfg = apply_axis(config, axis, values[i]);
        const auto subdir =
            (fs::path(out_dir) / (axis + "_" + format_double(values[i]))).string();
        rows[i].art = run_and_write(rowcfg, subdir);
    };

    const int njobs = std::max(1, jobs);
    if (njobs == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
    } else {
        std::vector<std::future<void>> pending;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            pending.push_back(std::async(std::launch::async, run_row, i));
            if (pending.size() == static_cast<std::size_t>(njobs)) {
                for (auto& f : pending) f.get();
                pending.clear();
            }
        }
        for (auto& f : pending) f.get();
    }

    std::ofstream out(fs::path(out_dir) / "sweep.csv");
    if (!out) {
        std::cerr << "sweep: cannot open summary for writing\n";
        return exit_config_error;
    }
    out << "value,exit_code,t_stop,eps_at_stop,Ts_estimate,beta_eff,fit_r2,nu_fit,"
           "drift_residual_max,worst_bootstrap,worst_eta_bound,worst_outer_bound,worst_rate\n";
    for (const auto& row : rows) {
        const auto& r = row.art.report;
        out << format_double(row.value) << ',' << row.art.exit_code << ',';
        out << (r.blowup ? format_double(r.blowup->t_stop) : std::string()) << ',';
        out << (r.blowup ? format_double(r.blowup->eps_at_stop) : std::string()) << ',';
        out << (r.blowup ? csv_opt(r.blowup->Ts_estimate) : std::string()) << ',';
        out << (r.blowup ? csv_opt(r.blowup->beta_eff) : std::string()) << ',';
        out << (r.blowup ? csv_opt(r.blowup->fit_r2) : std::string()) << ',';
        out << (r.cusp_fit ? csv_opt(r.cusp_fit->nu_fit) : std::string()) << ',';
        out << (r.universal ? format_double(r.universal->max_drift_residual) : std::string())
            << ',';
        if (r.certified_monitors) {
            const auto& c = *r.certified_monitors;
            out << format_double(c.bootstrap.value) << ',' << format_double(c.eta_bound.value)
                << ',' << format_double(c.outer_bound.value) << ','
                << format_double(c.rate.value) << '\n';
        } else {
            out << ",,,\n";
        }
    }
    return exit_ok;
}

} // namespace cuspflow
