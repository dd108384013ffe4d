#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "aplab/scenario.hpp"

namespace aplab {

inline constexpr int kReportFormatVersion = 1;

/// Runs one scenario: solve, requested diagnostics, artifacts.  Writes
/// <out_dir>/<name>/field.csv, report.json and SVG plots; returns the report.
/// Deterministic: identical scenario + seed produce bit-identical reports.
nlohmann::json run_scenario(const Scenario& scenario, const std::string& out_dir);

/// Convenience overload loading the scenario from a config file.
nlohmann::json run_scenario_file(const std::string& scenario_path, const std::string& out_dir);

struct AssertionResult {
    std::string expr;
    std::string status; // "pass" | "fail" | "reported_not_asserted"
    std::string measured;
};

struct SuiteResult {
    bool all_passed = true;
    nlohmann::json summary;
};

/// Runs every scenario listed in a manifest and evaluates its assertions
/// against the report.  Monotonicity-of-Weiss assertions are downgraded to
/// "reported, not asserted" for non-Laplacian operators, where the guarantee
/// does not apply.  Writes <out_dir>/summary.json.
SuiteResult run_suite(const std::string& manifest_path, const std::string& out_dir);

/// Emits the SVG plots a report supports: Weiss-vs-radius, log-log growth
/// with fitted slope, free-boundary scatter with cone overlays, and for 1D
/// runs a solution-vs-oracle overlay.  Returns the written paths.
std::vector<std::string> render_plots(const nlohmann::json& report, const std::string& out_dir);

} // namespace aplab
