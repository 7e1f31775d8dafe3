#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cuspflow {

enum class RunMode { certified, uncertified };

struct ProfileConfig {
    std::string family = "poly-bump";
    std::vector<double> params{3.0};
    double R = 1.0;
};

struct GridConfig {
    std::size_t N = 4096;
    double grading = 12.0; // decades of log refinement near 0
    std::optional<double> x_min_factor; // alternative spelling: grading = -log10(factor)
};

struct ControlConfig {
    double safety = 0.05;
    double dt_max = 0.1;
    std::optional<double> eps_stop; // default max(1e-12, 1e-6 eps0), resolved at assembly
    double t_max = 10.0;
    double rk_tolerance = 1e-10;
};

struct OutputConfig {
    std::optional<std::string> directory;
    int snapshot_stride = 20;
    bool write_csv = true;
};

struct MarginConfig {
    double k_bound = 0.01;   // K0/K1 margin around -theta0''(0)
    double condition3 = 0.05; // required slack on condition 3
};

struct ConstantOverrides { // certified mode only; gates still apply
    std::optional<double> beta, kappa, eps0;
};

struct RunConfig {
    ProfileConfig profile;
    RunMode mode = RunMode::uncertified;
    std::optional<double> eps0; // uncertified mode only; defaults to 1
    GridConfig grid;
    ControlConfig control;
    OutputConfig outputs;
    MarginConfig margins;
    std::optional<ConstantOverrides> overrides;

    double grading() const;
};

/// Strict parse of the documented key-value schema (JSON text with sections
/// profile / mode / eps0 / grid / control / outputs / margins / override).
/// Unknown keys are rejected with their path; throws config_error.
RunConfig parse_config(const std::string& text);

nlohmann::json config_to_json(const RunConfig& c);

} // namespace cuspflow
