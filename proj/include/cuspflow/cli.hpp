#pragma once

#include "cuspflow/certify.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/integrator.hpp"
#include "cuspflow/profile.hpp"
#include "cuspflow/report.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cuspflow {

/// Constant-selection pipeline for certified mode: seeds the quadratic
/// envelope at -theta0''(0) with the configured margin, selects (beta,
/// kappa, eps0), applies overrides, then re-verifies the envelope with
/// fit_k_bounds at the final eps0 and prices the three condition margins.
/// Failures are collected rather than thrown so a certificate can still be
/// written for a rejected selection.
struct CertifyOutcome {
    std::optional<CertificateData> certificate;
    std::vector<std::string> failures;
};

CertifyOutcome certify_pipeline(const RunConfig& config, const InitialProfile& profile);

struct Assembled {
    InitialProfile profile;
    Forcing forcing;
    LagrangianGrid grid;
    std::optional<CertificateData> certificate;
    StepControl control;
};

/// Builds profile/forcing/grid/control from a parsed config; throws
/// config_error (exit 3) on any gate failure.
Assembled assemble(const RunConfig& config);

struct RunArtifacts {
    int exit_code = exit_config_error;
    RunReport report;
};

/// Full run pipeline: assemble, integrate, analyze, and write snapshots.csv,
/// theta.csv, report.json (and certificate.json in certified mode) under
/// out_dir. Always leaves a schema-valid report.json behind, also on failure.
RunArtifacts run_and_write(const RunConfig& config, const std::string& out_dir);

int cmd_run(const RunConfig& config, const std::string& out_dir);
int cmd_certify(const RunConfig& config, const std::string& out_dir);
int cmd_analyze(const RunConfig& config, const std::string& out_dir);
int cmd_sweep(const RunConfig& config, const std::string& axis, std::span<const double> values,
              const std::string& out_dir, int jobs = 1);

} // namespace cuspflow
