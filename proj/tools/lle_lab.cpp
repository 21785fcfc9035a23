#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lle/error.hpp"
#include "lle/harness.hpp"
#include "lle/version.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  int jobs = -1;
  long long seed = -1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("-c,--config", f.config, "JSON config file (defaults when omitted)");
  cmd->add_option("-s,--set", f.overrides, "override a config value, e.g. --set wave.k=0.21")->take_all();
  cmd->add_option("-o,--out", f.out, "artifact directory (default $LLE_OUTPUT_ROOT/<output_dir>)");
  cmd->add_option("-j,--jobs", f.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--seed", f.seed, "seed for randomized corpora and perturbations");
}

lle::ExperimentConfig resolve(const RunFlags& f) {
  lle::ExperimentConfig c = f.config.empty() ? lle::default_config() : lle::load_config(f.config);
  for (const auto& o : f.overrides) lle::apply_override(c, o);
  if (f.jobs >= 0) c.jobs = f.jobs;
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  return c;
}

void print_criteria(const nlohmann::json& summary) {
  if (summary.contains("gate")) std::cout << summary["gate"].get<std::string>() << '\n';
  if (summary.contains("error"))
    std::cout << "error [" << summary["error"]["kind"].get<std::string>() << "] in stage "
              << summary["error"]["stage"].get<std::string>() << ": " << summary["error"]["message"].get<std::string>()
              << '\n';
  if (!summary.contains("criteria")) return;
  for (const auto& [k, v] : summary["criteria"].items()) {
    const auto& p = v["pass"];
    std::cout << "criterion " << k << ": " << (p.is_null() ? "not run" : (p.get<bool>() ? "PASS" : "FAIL")) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic-wave stability and modulation lab for the Lugiato-Lefever equation"};
  app.set_version_flag("--version", lle::kToolVersion);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> scenarios = {
      {"solve-wave", "solve the steady periodic wave"},
      {"spectrum", "Bloch spectrum and stability verdict"},
      {"evolve", "simulate one perturbation run and save the trajectory"},
      {"damping", "energy damping reports and residual split"},
      {"equivalence", "randomized norm-equivalence corpus"},
      {"whitham-compare", "decay rates and heat-flow comparison"},
      {"full-pipeline", "every stage with a pass/fail summary"}};
  std::vector<RunFlags> flags(scenarios.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    cmds.push_back(app.add_subcommand(scenarios[i].first, scenarios[i].second));
    add_run_flags(cmds.back(), flags[i]);
  }
  RunFlags defaults_flags;
  auto* defaults = app.add_subcommand("defaults", "print the resolved config (defaults plus file and overrides)");
  defaults->add_option("-c,--config", defaults_flags.config, "JSON config file");
  defaults->add_option("-s,--set", defaults_flags.overrides, "override a config value")->take_all();
  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize a completed artifact directory");
  report->add_option("directory", report_dir, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lle::kExitConfig;
  }

  try {
    if (defaults->parsed()) {
      std::cout << lle::config_to_json(resolve(defaults_flags)).dump(2) << '\n';
      return lle::kExitPass;
    }
    if (report->parsed()) {
      std::cout << lle::emit_report(report_dir);
      return lle::kExitPass;
    }
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      if (!cmds[i]->parsed()) continue;
      const lle::ExperimentConfig config = resolve(flags[i]);
      const std::string dir = lle::artifact_directory(config, flags[i].out);
      const auto result = lle::run_scenario(config, lle::scenario_from_string(scenarios[i].first), dir);
      std::cout << "artifacts: " << result.directory << '\n';
      print_criteria(result.summary);
      return result.exit_code;
    }
  } catch (const lle::Error& e) {
    std::cerr << "error [" << lle::to_string(e.kind()) << "]: " << e.what() << '\n';
    return lle::is_configuration_error(e.kind()) ? lle::kExitConfig : lle::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lle::kExitNumerical;
  }
  return lle::kExitPass;
}
