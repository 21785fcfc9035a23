#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lle/config.hpp"
#include "lle/error.hpp"
#include "lle/harness.hpp"
#include "support.hpp"

using namespace lle;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no lle::Error thrown");
  return ErrorKind::Backend;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lle_test_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

ExperimentConfig constant_config() {
  ExperimentConfig c = default_config();
  c.wave_seed = "constant";
  c.n_xi = 64;
  c.n_modes = 32;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config round trip, overrides and hash") {
  const ExperimentConfig c = default_config();
  const nlohmann::json j = config_to_json(c);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  ExperimentConfig o = c;
  apply_override(o, "runs.localized.periods=128");
  apply_override(o, "whitham.phase_method=windowed-xcorr");
  CHECK(o.localized.periods == 128);
  CHECK(o.phase_method == PhaseMethod::WindowedXcorr);
  CHECK(config_hash(o) != config_hash(c));
  CHECK(config_to_json(config_from_json(config_to_json(o))) == config_to_json(o));

  CHECK(kind_of([&] { config_from_json({{"lle", {{"gamma", 1.0}}}}); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { config_from_json({{"bogus", 1}}); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { config_from_json({{"wave", {{"k", -0.2}}}}); }) == ErrorKind::Configuration);
  ExperimentConfig bad = c;
  CHECK(kind_of([&] { apply_override(bad, "runs.nowhere.periods=3"); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { apply_override(bad, "no-equals-sign"); }) == ErrorKind::Configuration);

  SUBCASE("shipped config matches the defaults") {
    const ExperimentConfig shipped = load_config(LLE_SOURCE_DIR "/configs/stable.json");
    CHECK(config_hash(shipped) == config_hash(c));
  }
}

TEST_CASE("scenario names and output directories") {
  for (Scenario s : {Scenario::SolveWave, Scenario::Spectrum, Scenario::Evolve, Scenario::Damping,
                     Scenario::Equivalence, Scenario::WhithamCompare, Scenario::FullPipeline})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK(kind_of([] { scenario_from_string("everything"); }) == ErrorKind::Configuration);

  ExperimentConfig c = default_config();
  CHECK(artifact_directory(c, "/tmp/explicit") == "/tmp/explicit");
  ::setenv("LLE_OUTPUT_ROOT", "/tmp/lle_root", 1);
  CHECK(output_root() == "/tmp/lle_root");
  CHECK(fs::path(artifact_directory(c)) == fs::path("/tmp/lle_root") / "stable");
  ::unsetenv("LLE_OUTPUT_ROOT");
  CHECK(output_root() == "runs");
}

TEST_CASE("solve-wave on a constant-state config") {
  const TempDir tmp;
  const ScenarioResult r = run_scenario(constant_config(), Scenario::SolveWave, tmp.sub("wave"));
  CHECK(r.exit_code == kExitPass);
  const auto wave = read_json(fs::path(r.directory) / "wave.json");
  CHECK(wave["residual"].get<double>() < 1e-12);
  CHECK(r.summary["criteria"]["1"]["is_constant"].get<bool>());
  CHECK(r.summary["status"] == "complete");
  for (const char* f : {"config.json", "manifest.json", "summary.json"}) CHECK(fs::exists(fs::path(r.directory) / f));
  CHECK(config_from_json(read_json(fs::path(r.directory) / "config.json")).wave_seed == "constant");

  SUBCASE("report from the completed directory") {
    const auto before = slurp(fs::path(r.directory) / "summary.json");
    const std::string md = emit_report(r.directory);
    CHECK(md.find("## Wave") != std::string::npos);
    CHECK(md.find("| 1 | PASS |") != std::string::npos);
    CHECK(fs::exists(fs::path(r.directory) / "report.md"));
    CHECK(slurp(fs::path(r.directory) / "summary.json") == before);
  }
}

TEST_CASE("unstable wave closes the gate") {
  const TempDir tmp;
  const ScenarioResult spec = run_scenario(constant_config(), Scenario::Spectrum, tmp.sub("spectrum"));
  CHECK(spec.exit_code == kExitCriterion);
  CHECK(spec.summary["criteria"]["2"]["verdict"] == "unstable");
  CHECK_FALSE(spec.summary["criteria"]["2"]["pass"].get<bool>());

  const ScenarioResult damp = run_scenario(constant_config(), Scenario::Damping, tmp.sub("damping"));
  CHECK(damp.exit_code == kExitCriterion);
  CHECK(damp.summary["status"] == "gated");
  CHECK(damp.summary["gate"].get<std::string>().find("stability gate closed") != std::string::npos);
  CHECK_FALSE(fs::exists(fs::path(damp.directory) / "damping.json"));
  CHECK_FALSE(damp.summary["criteria"].contains("6"));
  const auto manifest = read_json(fs::path(damp.directory) / "manifest.json");
  CHECK(manifest["status"] == "gated");

  const ScenarioResult whitham = run_scenario(constant_config(), Scenario::WhithamCompare, tmp.sub("whitham"));
  CHECK(whitham.summary["status"] == "gated");
  CHECK_FALSE(fs::exists(fs::path(whitham.directory) / "whitham.json"));
  CHECK(emit_report(whitham.directory).find("stability gate closed") != std::string::npos);
}

TEST_CASE("errors map to exit codes") {
  const TempDir tmp;
  ExperimentConfig c = default_config();
  c.params.beta = 0.0;
  const ScenarioResult r = run_scenario(c, Scenario::SolveWave, tmp.sub("beta0"));
  CHECK(r.exit_code == kExitConfig);
  const auto err = read_json(fs::path(r.directory) / "error.json");
  CHECK(err["stage"] == "solve-wave");
  CHECK(err["config_hash"] == config_hash(c));
  CHECK(r.summary["status"] == "error");

  ExperimentConfig nc = default_config();
  nc.newton_max_iters = 1;
  nc.newton_tol = 1e-300;
  const ScenarioResult n = run_scenario(nc, Scenario::SolveWave, tmp.sub("newton"));
  CHECK(n.exit_code == kExitNumerical);

  CHECK(is_configuration_error(ErrorKind::Configuration));
  CHECK(is_configuration_error(ErrorKind::Parameter));
  CHECK_FALSE(is_configuration_error(ErrorKind::NoConvergence));
}

TEST_CASE("report on an empty directory names the missing index") {
  const TempDir tmp;
  fs::create_directories(tmp.sub("empty"));
  try {
    emit_report(tmp.sub("empty"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingArtifact);
    CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
  }
}

TEST_CASE("equivalence scenario is deterministic") {
  const TempDir tmp;
  ExperimentConfig c = default_config();
  c.corpus_samples = 12;
  const ScenarioResult a = run_scenario(c, Scenario::Equivalence, tmp.sub("a"));
  const ScenarioResult b = run_scenario(c, Scenario::Equivalence, tmp.sub("b"));
  CHECK(a.exit_code == kExitPass);
  CHECK(a.summary["criteria"]["4"]["violations"] == 0);
  for (const char* f : {"equivalence_lp.csv", "equivalence_hk.csv"}) {
    const std::string body = slurp(fs::path(a.directory) / f);
    CHECK_FALSE(body.empty());
    CHECK(body == slurp(fs::path(b.directory) / f));
  }
  CHECK(emit_report(a.directory).find("violations: 0 / 12") != std::string::npos);

  c.seed += 1;
  const ScenarioResult other = run_scenario(c, Scenario::Equivalence, tmp.sub("c"));
  CHECK(slurp(fs::path(other.directory) / "equivalence_lp.csv") != slurp(fs::path(a.directory) / "equivalence_lp.csv"));
}

}  // TEST_SUITE
