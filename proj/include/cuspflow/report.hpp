#pragma once

#include "cuspflow/analysis.hpp"
#include "cuspflow/certify.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/integrator.hpp"
#include "cuspflow/profile.hpp"

#include <optional>
#include <string>

#include <json.hpp>

namespace cuspflow {

struct CertificateData {
    CertifiedConstants constants;
    KBounds k_fit;       // raw envelope fitted at the final eps0
    double theta_second_0 = 0.0;
    double k_margin = 0.0;
    double condition3_margin = 0.0;
};

nlohmann::json certificate_to_json(const CertificateData& cert);

/// Everything a completed (or aborted) run reports. Serialized with the
/// fixed top-level keys: config, constants, blowup, cusp_fit, needle,
/// monitors, violations, timing.
struct RunReport {
    nlohmann::json config_echo;
    std::optional<CertificateData> certificate;
    std::optional<BlowupReport> blowup;
    std::optional<CuspFit> cusp_fit;
    std::optional<CuspSlack> cusp_slack; // certified runs only
    std::optional<CuspBound> cusp_bound;
    std::optional<NeedleDiagnostic> needle;
    std::optional<UniversalMonitor> universal;
    std::optional<CertifiedMonitorSummary> certified_monitors;
    std::vector<Violation> violations;
    Timing timing;
    int exit_code = 0;
};

nlohmann::json report_to_json(const RunReport& report);

void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace cuspflow
