#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace toalab::runner {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    double tolerance_scale = 1.0;
};

struct RunResult {
    std::string kind;
    std::vector<std::filesystem::path> artifacts;  // CSVs, sidecars and report.json, in write order
    std::string report;                            // contents of report.json
};

// Parses and validates every payload invariant; no computation runs. Returns the scenario kind.
std::string validate_scenario(const std::filesystem::path& config, const RunOptions& options = {});

// Validates, computes, and writes artifacts into options.out_dir (created if missing).
RunResult run_scenario(const std::filesystem::path& config, const RunOptions& options = {});

// Compares two density or sweep CSVs that carry JSON sidecars (same stem, .json) on a common grid.
std::string compare_artifacts(const std::filesystem::path& a, const std::filesystem::path& b);

struct ScenarioInfo {
    std::string file;
    std::string kind;
    std::string description;
};

std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& directory);

}  // namespace toalab::runner
