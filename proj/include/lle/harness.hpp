#pragma once

#include <string>

#include <json.hpp>

#include "lle/config.hpp"

namespace lle {

enum class Scenario { SolveWave, Spectrum, Evolve, Damping, Equivalence, WhithamCompare, FullPipeline };
const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Exit statuses of the CLI.
enum ExitCode : int { kExitPass = 0, kExitCriterion = 1, kExitConfig = 2, kExitNumerical = 3 };

struct ScenarioResult {
  int exit_code = kExitPass;
  std::string directory;
  nlohmann::json summary;
};

/// $LLE_OUTPUT_ROOT, or "runs" when unset.
std::string output_root();
/// Explicit directory if given, else <output_root>/<config.output_dir>.
std::string artifact_directory(const ExperimentConfig& config, const std::string& explicit_dir = {});

/// Runs a scenario, writing config.json, manifest.json, stage artifacts and summary.json into
/// `directory`. Library errors are caught, recorded in error.json and mapped to exit codes.
ScenarioResult run_scenario(const ExperimentConfig& config, Scenario scenario, const std::string& directory);

/// Writes report.md (and returns its text) from a completed artifact directory.
std::string emit_report(const std::string& directory);

}  // namespace lle
