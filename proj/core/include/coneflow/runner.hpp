#pragma once

#include <string>
#include <vector>

#include "coneflow/config.hpp"

namespace coneflow {

enum class CheckStatus { pass, fail, degenerate };

std::string to_string(CheckStatus status);

struct CheckResult {
    std::string name;
    CheckStatus status;
    double measured;
    double threshold;
    double wall_seconds;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    std::string out_dir; ///< resolved output directory

    bool all_passed() const;
    int failures() const;
};

/// Executes the selected suites, writes one CSV per experiment plus
/// report.txt under the output directory, and returns the per-check results.
/// Module errors are captured as failed checks, never propagated.
///
/// Output directory precedence: out_override argument, then the CONEFLOW_OUT
/// environment variable, then the config's [output] dir.
SuiteReport run(const RunConfig& cfg, const std::string& out_override = "");

/// Fixed CSV float formatting: 17 significant digits, '.' separator.
std::string format_csv_value(double v);

} // namespace coneflow
