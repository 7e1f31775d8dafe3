#pragma once

#include <stdexcept>
#include <string>

namespace cuspflow {

// Exit-code contract shared by the CLI and the run harness.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invariant_violation = 2;
inline constexpr int exit_config_error = 3;
inline constexpr int exit_no_blowup = 4;

/// Configuration, schema, or feasibility fault (CLI exit 3).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Rejected initial data; `violation` names the failed admissibility check.
struct profile_error : config_error {
    std::string violation;
    profile_error(std::string violation_, const std::string& what)
        : config_error(what), violation(std::move(violation_)) {}
};

/// A constant-selection or K-bound recipe that cannot be satisfied (exit 3).
struct infeasible_error : config_error {
    explicit infeasible_error(const std::string& what) : config_error(what) {}
};

/// A solver state that stopped satisfying a hard invariant (exit 2).
struct state_error : std::runtime_error {
    explicit state_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cuspflow
