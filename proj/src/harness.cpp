#include "lle/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "lle/bloch.hpp"
#include "lle/error.hpp"
#include "lle/fft.hpp"
#include "lle/parallel.hpp"
#include "lle/version.hpp"

namespace lle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json criterion(bool pass, json detail) {
  detail["pass"] = pass;
  return detail;
}

class Context {
 public:
  Context(const ExperimentConfig& c, Scenario s, std::string dir) : config(c), scenario(s), dir(std::move(dir)) {
    fs::create_directories(this->dir);
    hash = config_hash(c);
  }

  std::string path(const std::string& name) {
    const fs::path p = fs::path(dir) / name;
    fs::create_directories(p.parent_path());
    artifacts.push_back(name);
    return p.string();
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f(path(name));
    require(static_cast<bool>(f), ErrorKind::MissingArtifact, "cannot write " + name);
    f << j.dump(2) << '\n';
  }

  void begin(const std::string& s) { stage = s; }
  void done() { stages.push_back(stage); }

  void write_manifest(const std::string& status) {
    json m = {{"scenario", to_string(scenario)},
              {"tool_version", kToolVersion},
              {"config_hash", hash},
              {"status", status},
              {"stages", stages},
              {"artifacts", artifacts}};
    std::ofstream f(fs::path(dir) / "manifest.json");
    f << m.dump(2) << '\n';
  }

  const ExperimentConfig& config;
  Scenario scenario;
  std::string dir;
  std::string hash;
  std::string stage = "setup";
  std::vector<std::string> stages;
  std::vector<std::string> artifacts;
};

// Not-stable waves never reach the damping or asymptotics stages.
class GateClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PeriodicWave obtain_wave(const ExperimentConfig& c) {
  const int m = c.points_per_period;
  const NewtonOptions newton{c.newton_max_iters, c.newton_tol};
  const auto states = constant_states(c.params);
  if (c.wave_seed == "coefficients") {
    require(!c.seed_coefficients.empty(), ErrorKind::Configuration, "wave.seed_coefficients is empty");
    ComplexField coeffs = ComplexField::Zero(m);
    for (const auto& [mode, z] : c.seed_coefficients) {
      require(std::abs(mode) < m / 2, ErrorKind::Configuration, "seed coefficient mode exceeds resolution");
      coeffs[(mode + m) % m] = z;
    }
    return center_wave(solve_steady(c.params, c.k, ifft(coeffs), newton));
  }
  ComplexField guess = ComplexField::Constant(m, states.back());
  if (c.wave_seed == "constant") return solve_steady(c.params, c.k, guess, newton);
  const Grid g(static_cast<std::size_t>(m), 1.0 / c.k);
  for (int i = 0; i < m; ++i) guess[i] += c.relax_amplitude * std::cos(2.0 * std::numbers::pi * i / m);
  const Trajectory tr = evolve(FieldState{g, 0.0, guess}, c.params,
                               EvolveOptions{c.relax_time, c.dt, std::max(1, int(std::lround(c.relax_time / c.dt))), false});
  return center_wave(solve_steady(c.params, c.k, tr.states.back(), newton));
}

PeriodicWave refined_wave(const ExperimentConfig& c, const PeriodicWave& wave, int refine) {
  if (refine == 1) return wave;
  return center_wave(solve_steady(c.params, c.k, wave.period_values(wave.modes() * refine),
                                  NewtonOptions{c.newton_max_iters, c.newton_tol}));
}

struct WaveStage {
  PeriodicWave wave;
  json crit;
};

WaveStage stage_wave(Context& ctx) {
  ctx.begin("solve-wave");
  const auto t0 = std::chrono::steady_clock::now();
  PeriodicWave wave = obtain_wave(ctx.config);
  const double secs = seconds_since(t0);
  json j = wave_to_json(wave);
  ctx.write_json("wave.json", j);
  const bool pass = wave.residual_norm() < 1e-10 && wave.iterations() <= 15 && secs < 10.0;
  ctx.done();
  json crit = criterion(pass, {{"residual", wave.residual_norm()},
                               {"iterations", wave.iterations()},
                               {"seconds", secs},
                               {"is_constant", wave.is_constant()}});
  return {std::move(wave), std::move(crit)};
}

struct SpectrumStage {
  BlochSpectrum spectrum;
  json crit;
};

SpectrumStage stage_spectrum(Context& ctx, const PeriodicWave& wave) {
  ctx.begin("spectrum");
  const auto& c = ctx.config;
  const auto t0 = std::chrono::steady_clock::now();
  const LinearizedOperator op(wave);
  StabilityOptions so;
  so.delta_gap = c.delta_gap;
  so.xi_fit_factor = c.xi_fit_factor;
  so.jobs = c.jobs;
  BlochSpectrum s = assess_stability(op, c.n_xi, c.n_modes, so);
  const double secs = seconds_since(t0);
  json j = spectrum_verdict_json(s);
  j["seconds"] = secs;
  ctx.write_json("spectrum.json", j);
  write_spectrum_csv(s, ctx.path("spectrum.csv"));
  const bool pass = s.verdict == Verdict::Stable && s.max_re_nonzero < 0.0 && std::abs(s.lambda0) <= 1e-8 &&
                    s.curvature > 0.0 && s.fit_residual < 1e-2 && secs < 120.0;
  ctx.done();
  json crit = criterion(pass, {{"verdict", to_string(s.verdict)},
                               {"max_re_nonzero_xi", s.max_re_nonzero},
                               {"lambda_c0", s.lambda0},
                               {"curvature_d", s.curvature},
                               {"fit_relative_residual", s.fit_residual},
                               {"seconds", secs}});
  return {std::move(s), std::move(crit)};
}

void gate(const SpectrumStage& s) {
  if (s.spectrum.verdict != Verdict::Stable)
    throw GateClosed(std::string("stability gate closed: spectrum verdict is ") + to_string(s.spectrum.verdict) +
                     (s.spectrum.diagnostic.empty() ? "" : " (" + s.spectrum.diagnostic + ")") +
                     "; downstream stages skipped");
}

json stage_linear_rate(Context& ctx, const PeriodicWave& wave) {
  ctx.begin("linear-rate");
  const auto& c = ctx.config;
  const Grid g(static_cast<std::size_t>(c.linear_periods * c.points_per_period), c.linear_periods / c.k);
  const double xi = 2.0 * std::numbers::pi * c.k * c.linear_xi_index / c.linear_periods;
  const LinearizedOperator op(wave);
  const BlochMode mode = bloch_mode(op, xi, c.n_modes, g, 0);
  const ComplexField phi = wave.profile(g);
  // Real and imaginary parts of the complex mode evolve into those of e^{lambda t} mode.
  double n0 = 0.0, n1 = 0.0;
  for (int part = 0; part < 2; ++part) {
    ComplexField v(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const auto r = part == 0 ? mode.field_r[i] : std::complex<double>(0.0, -1.0) * mode.field_r[i];
      const auto q = part == 0 ? mode.field_i[i] : std::complex<double>(0.0, -1.0) * mode.field_i[i];
      v[i] = {r.real(), q.real()};
    }
    const Trajectory tr = evolve(FieldState{g, 0.0, ComplexField(phi + v)}, c.params,
                                 EvolveOptions{c.linear_t_final, c.dt / 5.0,
                                               int(std::lround(c.linear_t_final / (c.dt / 5.0))), true},
                                 wave);
    n0 += std::pow(lp_norm(g, v, 2.0), 2);
    n1 += std::pow(lp_norm(g, ComplexField(tr.states.back() - phi), 2.0), 2);
  }
  const double measured = std::sqrt(n1 / n0);
  const double predicted = std::exp(c.linear_t_final * mode.lambda.real());
  const double rel = std::abs(measured / predicted - 1.0);
  json j = {{"xi", xi},
            {"lambda_re", mode.lambda.real()},
            {"lambda_im", mode.lambda.imag()},
            {"t", c.linear_t_final},
            {"measured_ratio", measured},
            {"predicted_ratio", predicted},
            {"relative_error", rel}};
  ctx.write_json("linear_rate.json", j);
  ctx.done();
  return criterion(rel < 1e-2 && mode.lambda.real() < 0.0, j);
}

json stage_evolve(Context& ctx, const PeriodicWave& wave) {
  ctx.begin("evolve");
  const auto& c = ctx.config;
  const RunSpec& r = c.run(c.evolve_run);
  const Grid g = c.grid_for(r);
  const Perturbation p = make_perturbation(c.perturbation_for(r, wave), wave, g);
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory tr = evolve(p.state, c.params, EvolveOptions{r.t_final, c.dt, r.save_every, false}, wave);
  const double secs = seconds_since(t0);
  const std::string dir = ctx.path("trajectory/metadata.json");
  save_trajectory(tr, fs::path(dir).parent_path().string());
  json j = {{"run", c.evolve_run},
            {"kind", to_string(r.kind)},
            {"n_points", g.size()},
            {"length", g.length()},
            {"snapshots", tr.size()},
            {"applied_shift", p.applied_shift},
            {"seconds", secs}};
  ctx.write_json("evolve.json", j);
  ctx.done();
  return j;
}

json stage_equivalence(Context& ctx, json& crit5) {
  ctx.begin("equivalence");
  const auto& c = ctx.config;
  const auto t0 = std::chrono::steady_clock::now();
  const CorpusResult base = run_equivalence_corpus(c.seed, c.corpus_samples, c.corpus_p, c.corpus, c.corpus.n_points, c.jobs);
  const CorpusResult fine =
      run_equivalence_corpus(c.seed, c.corpus_samples, c.corpus_p, c.corpus, 2 * c.corpus.n_points, c.jobs);
  const double secs = seconds_since(t0);
  write_lp_csv(base.lp, c.corpus_p.size(), ctx.path("equivalence_lp.csv"));
  write_hk_csv(base.hk, ctx.path("equivalence_hk.csv"));
  double min_slack = std::numeric_limits<double>::infinity();
  double min_printed = std::numeric_limits<double>::infinity();
  for (const auto& r : base.lp) {
    min_slack = std::min({min_slack, r.slack_lower_inverse, r.slack_upper_inverse, r.slack_lower_shifted,
                          r.slack_upper_shifted});
    min_printed = std::min({min_printed, r.slack_lower_inverse_printed, r.slack_lower_shifted_printed});
  }
  const double ratio = fine.max_hk_constant / base.max_hk_constant;
  json j = {{"samples", c.corpus_samples},
            {"violations", base.violations},
            {"violations_refined", fine.violations},
            {"min_slack", min_slack},
            {"min_printed_lower_slack", min_printed},
            {"max_hk_constant", base.max_hk_constant},
            {"max_hk_constant_refined", fine.max_hk_constant},
            {"hk_constant_ratio", ratio},
            {"max_roundtrip", base.max_roundtrip},
            {"seconds", secs}};
  ctx.write_json("equivalence.json", j);
  const bool pass4 = base.violations == 0 && fine.violations == 0 && std::isfinite(base.max_hk_constant) &&
                     std::isfinite(fine.max_hk_constant) && ratio < 2.0 && ratio > 0.5 && secs < 300.0;
  crit5 = criterion(base.max_roundtrip < 1e-9, {{"max_roundtrip", base.max_roundtrip}});
  ctx.done();
  return criterion(pass4, j);
}

json stage_damping(Context& ctx, const PeriodicWave& wave) {
  ctx.begin("damping");
  const auto& c = ctx.config;
  const RunSpec& r = c.damping;
  const DampingOptions opts = c.damping_options();
  const std::vector<DampingVariable> vars = {DampingVariable::Unmodulated, DampingVariable::Forward,
                                             DampingVariable::Inverse};
  json runs = json::array();
  std::vector<std::vector<double>> best(2);
  bool all_nonempty = true;
  const std::vector<int> refines = c.damping_refine > 1 ? std::vector<int>{1, c.damping_refine} : std::vector<int>{1};
  for (std::size_t ri = 0; ri < refines.size(); ++ri) {
    const int refine = refines[ri];
    const PeriodicWave w = refined_wave(c, wave, refine);
    const Grid g = c.grid_for(r, refine);
    const Perturbation p = make_perturbation(c.perturbation_for(r, w), w, g);
    const Trajectory tr = evolve(p.state, c.params, EvolveOptions{r.t_final, c.dt, r.save_every, false}, w);
    const auto phases = phase_series(tr, w, c.phase_options());
    const std::string tag = "r" + std::to_string(refine);
    for (DampingVariable v : vars) {
      const DampingReport rep = damping_report(tr, w, v, opts, phases);
      json jr = to_json(rep);
      jr["refine"] = refine;
      jr["n_points"] = g.size();
      ctx.write_json("damping/" + std::string(to_string(v)) + "_" + tag + ".json", jr);
      write_slack_csv(rep, ctx.path("damping/" + std::string(to_string(v)) + "_" + tag + "_slack.csv"));
      all_nonempty = all_nonempty && rep.nonempty && rep.best_theta > 0.0;
      best[ri].push_back(rep.nonempty ? rep.best_theta : 0.0);
      runs.push_back({{"variable", to_string(v)},
                      {"refine", refine},
                      {"nonempty", rep.nonempty},
                      {"best_theta", rep.best_theta},
                      {"best_c", rep.best_c},
                      {"theta_at_scan_max", rep.nonempty && rep.best_theta >= rep.theta.back()},
                      {"max_hk", rep.max_hk}});
      if (refine == 1) {
        const EnergyLedger L = energy_ledger(tr, w, v, c.j_max, phases);
        write_ledger_csv(L, ctx.path("damping/" + std::string(to_string(v)) + "_ledger.csv"));
      }
    }
  }
  // Residual split on a short, densely saved run.
  json residuals = json::array();
  {
    const Grid g = c.grid_for(r);
    const Perturbation p = make_perturbation(c.perturbation_for(r, wave), wave, g);
    const Trajectory tr = evolve(p.state, c.params, EvolveOptions{c.residual_t_final, c.dt, 1, false}, wave);
    const auto phases = phase_series(tr, wave, c.phase_options());
    for (DampingVariable v : {DampingVariable::Unmodulated, DampingVariable::Forward})
      for (int j = 1; j <= c.j_max; ++j) {
        const ResidualDecomposition rd = residual_decomposition(tr, wave, v, j, phases);
        const std::string name = "damping/residual_" + std::string(to_string(v)) + "_j" + std::to_string(j);
        write_residual_csv(rd, ctx.path(name + ".csv"));
        residuals.push_back(to_json(rd));
      }
  }
  double worst = 0.0;
  if (refines.size() == 2)
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (best[0][i] > 0.0) worst = std::max(worst, std::abs(best[1][i] / best[0][i] - 1.0));
  json j = {{"runs", runs}, {"residuals", residuals}, {"max_theta_change", worst}};
  ctx.write_json("damping.json", j);
  ctx.done();
  return criterion(all_nonempty && refines.size() == 2 && worst <= 0.2,
                   {{"runs", runs}, {"max_theta_change", worst}});
}

struct AsymRun {
  AsymptoticsReport report;
  double e0 = 0.0;
  double seconds = 0.0;
  double applied_shift = 0.0;
};

AsymRun asymptotics_run(const ExperimentConfig& c, const PeriodicWave& wave, const RunSpec& r, double diffusion,
                        bool localized) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g = c.grid_for(r);
  const Perturbation p = make_perturbation(c.perturbation_for(r, wave), wave, g);
  const Trajectory tr = evolve(p.state, c.params, EvolveOptions{r.t_final, c.dt, r.save_every, false}, wave);
  const auto phases = phase_series(tr, wave, c.phase_options());
  const RealField h0 = p.h0 ? *p.h0 : RealField(RealField::Zero(static_cast<Eigen::Index>(g.size())));
  const WhithamRun heat = solve_heat_from_phase(g, h0, diffusion, tr.times, c.k);
  AsymRun out;
  out.report = compare_asymptotics(tr, phases, wave, heat, c.asymptotics_options());
  fit_report(out.report, c.asymptotics_options(), localized);
  out.e0 = h0.cwiseAbs().maxCoeff();
  out.applied_shift = p.applied_shift;
  out.seconds = seconds_since(t0);
  return out;
}

json fits_json(const AsymptoticsReport& r) {
  json j = json::object();
  for (const auto& f : r.fits) j[f.name] = to_json(f);
  return j;
}

std::vector<json> stage_whitham(Context& ctx, const PeriodicWave& wave) {
  ctx.begin("whitham-compare");
  const auto& c = ctx.config;
  const double d = whitham_diffusion(wave, c.xi_fit_factor * c.k, c.n_modes);
  RunSpec large = c.nonlocalized;
  large.periods *= c.domain_factor;
  large.t_final = std::min(large.t_final, c.domain_compare_time);
  std::vector<AsymRun> runs(3);
  const std::vector<const RunSpec*> specs = {&c.localized, &c.nonlocalized, &large};
  parallel_for(3, c.jobs, [&](std::size_t i) { runs[i] = asymptotics_run(c, wave, *specs[i], d, i == 0); });

  const char* names[] = {"localized", "nonlocalized", "nonlocalized_large"};
  for (std::size_t i = 0; i < 3; ++i) {
    json j = to_json(runs[i].report);
    j["diffusion"] = d;
    j["e0"] = runs[i].e0;
    j["applied_shift"] = runs[i].applied_shift;
    j["seconds"] = runs[i].seconds;
    ctx.write_json(std::string("asymptotics_") + names[i] + ".json", j);
    write_plot_data(runs[i].report, (fs::path(ctx.dir) / "plots" / names[i]).string());
    ctx.artifacts.push_back(std::string("plots/") + names[i] + "/");
  }
  const ContrastReport contrast =
      localized_vs_nonlocalized(runs[0].report, runs[1].report, &runs[2].report, c.domain_compare_time);
  ctx.write_json("contrast.json", to_json(contrast));

  const auto& loc = runs[0].report;
  const auto& nl = runs[1].report;
  const auto& fv = loc.fit("v_l2");
  const auto& fvt = loc.fit("vtilde_l2");
  json c7 = criterion(fv.pass && fvt.pass && runs[0].seconds < 1800.0,
                      {{"v_l2_exponent", num(fv.exponent)},
                       {"vtilde_l2_exponent", num(fvt.exponent)},
                       {"seconds", runs[0].seconds}});
  const auto& gl = nl.find("gamma_linf").values;
  const double gmax = *std::max_element(gl.begin(), gl.end());
  const auto& nv = nl.fit("v_l2");
  const double e0 = runs[1].e0;
  const bool growth_ok = std::abs(contrast.gamma_l2_growth - 1.4) <= 0.15;
  json c8 = criterion(nv.pass && gmax <= 2.0 * e0 && growth_ok,
                      {{"v_l2_exponent", num(nv.exponent)},
                       {"max_gamma_linf", gmax},
                       {"e0", e0},
                       {"gamma_l2_growth", contrast.gamma_l2_growth},
                       {"compare_time", contrast.compare_time}});
  const auto& pd = nl.fit("phase_diff_linf");
  const auto& kd = nl.fit("k_diff_l2");
  const auto& kn = nl.fit("k_l2");
  const double gap = kn.exponent - kd.exponent;
  json c9 = criterion(pd.exponent <= 0.0 + c.eta && gap >= 0.35,
                      {{"phase_diff_linf_exponent", num(pd.exponent)},
                       {"k_diff_l2_exponent", num(kd.exponent)},
                       {"k_l2_exponent", num(kn.exponent)},
                       {"exponent_gap", num(gap)}});
  ctx.write_json("whitham.json", {{"diffusion", d},
                                  {"localized", fits_json(loc)},
                                  {"nonlocalized", fits_json(nl)},
                                  {"contrast", to_json(contrast)}});
  ctx.done();
  return {c7, c8, c9};
}

int exit_for(const Error& e) { return is_configuration_error(e.kind()) ? kExitConfig : kExitNumerical; }

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::SolveWave: return "solve-wave";
    case Scenario::Spectrum: return "spectrum";
    case Scenario::Evolve: return "evolve";
    case Scenario::Damping: return "damping";
    case Scenario::Equivalence: return "equivalence";
    case Scenario::WhithamCompare: return "whitham-compare";
    case Scenario::FullPipeline: return "full-pipeline";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  for (Scenario v : {Scenario::SolveWave, Scenario::Spectrum, Scenario::Evolve, Scenario::Damping,
                     Scenario::Equivalence, Scenario::WhithamCompare, Scenario::FullPipeline})
    if (s == to_string(v)) return v;
  throw Error(ErrorKind::Configuration, "unknown scenario '" + s + "'");
}

std::string output_root() {
  const char* env = std::getenv("LLE_OUTPUT_ROOT");
  return env && *env ? std::string(env) : std::string("runs");
}

std::string artifact_directory(const ExperimentConfig& c, const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  return (fs::path(output_root()) / c.output_dir).string();
}

ScenarioResult run_scenario(const ExperimentConfig& config, Scenario scenario, const std::string& directory) {
  Context ctx(config, scenario, directory);
  ScenarioResult result;
  result.directory = directory;
  json summary = {{"scenario", to_string(scenario)}, {"tool_version", kToolVersion}, {"config_hash", ctx.hash}};
  json criteria = json::object();
  ctx.write_json("config.json", config_to_json(config));

  auto finish = [&](const std::string& status) {
    summary["status"] = status;
    if (!criteria.empty()) {
      summary["criteria"] = criteria;
      bool all = true;
      for (const auto& [key, value] : criteria.items())
        if (value.contains("pass") && value["pass"].is_boolean() && !value["pass"].get<bool>()) all = false;
      if (!all && result.exit_code == kExitPass) result.exit_code = kExitCriterion;
    }
    ctx.write_json("summary.json", summary);
    ctx.write_manifest(status);
    result.summary = summary;
    return result;
  };

  try {
    if (scenario == Scenario::Equivalence) {
      json c5;
      criteria["4"] = stage_equivalence(ctx, c5);
      criteria["5"] = c5;
      return finish("complete");
    }
    WaveStage w = stage_wave(ctx);
    criteria["1"] = w.crit;
    if (scenario == Scenario::SolveWave) return finish("complete");
    SpectrumStage s = stage_spectrum(ctx, w.wave);
    criteria["2"] = s.crit;
    if (scenario == Scenario::Spectrum) return finish("complete");
    gate(s);
    switch (scenario) {
      case Scenario::Evolve:
        summary["evolve"] = stage_evolve(ctx, w.wave);
        break;
      case Scenario::Damping:
        criteria["6"] = stage_damping(ctx, w.wave);
        break;
      case Scenario::WhithamCompare: {
        const auto c = stage_whitham(ctx, w.wave);
        criteria["7"] = c[0];
        criteria["8"] = c[1];
        criteria["9"] = c[2];
        break;
      }
      case Scenario::FullPipeline: {
        criteria["3"] = stage_linear_rate(ctx, w.wave);
        json c5;
        criteria["4"] = stage_equivalence(ctx, c5);
        criteria["5"] = c5;
        criteria["6"] = stage_damping(ctx, w.wave);
        const auto c = stage_whitham(ctx, w.wave);
        criteria["7"] = c[0];
        criteria["8"] = c[1];
        criteria["9"] = c[2];
        criteria["10"] = {{"pass", nullptr}, {"note", "property suites run under ctest"}};
        break;
      }
      default:
        break;
    }
    return finish("complete");
  } catch (const GateClosed& e) {
    summary["gate"] = e.what();
    result.exit_code = kExitCriterion;
    return finish("gated");
  } catch (const Error& e) {
    result.exit_code = exit_for(e);
    const json err = {{"stage", ctx.stage},
                      {"kind", to_string(e.kind())},
                      {"message", e.what()},
                      {"config_hash", ctx.hash}};
    ctx.write_json("error.json", err);
    summary["error"] = err;
    return finish("error");
  }
}

namespace {

json read_json(const fs::path& p) {
  std::ifstream f(p);
  require(static_cast<bool>(f), ErrorKind::MissingArtifact, "cannot read " + p.string());
  return json::parse(f);
}

std::string fmt(const json& v, int precision = 4) {
  if (v.is_null()) return "n/a";
  if (!v.is_number()) return v.dump();
  std::ostringstream s;
  s.precision(precision);
  s << v.get<double>();
  return s.str();
}

}  // namespace

std::string emit_report(const std::string& directory) {
  const fs::path dir(directory);
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw Error(ErrorKind::MissingArtifact,
                "no manifest.json in " + directory + " (expected manifest.json, summary.json from a completed run)");
  const json manifest = read_json(manifest_path);
  std::ostringstream md;
  md << "# Run report\n\n";
  md << "scenario: " << manifest.value("scenario", "?") << "  \n";
  md << "status: " << manifest.value("status", "?") << "  \n";
  md << "tool version: " << manifest.value("tool_version", "?") << "  \n";
  md << "config hash: " << manifest.value("config_hash", "?") << "\n\n";

  if (fs::exists(dir / "summary.json")) {
    const json s = read_json(dir / "summary.json");
    if (s.contains("gate")) md << "**" << s["gate"].get<std::string>() << "**\n\n";
    if (s.contains("error"))
      md << "error in stage `" << s["error"]["stage"].get<std::string>() << "`: " << s["error"]["message"].get<std::string>()
         << "\n\n";
    if (s.contains("criteria")) {
      md << "## Criteria\n\n| criterion | verdict |\n|---|---|\n";
      for (const auto& [k, v] : s["criteria"].items()) {
        const auto& p = v["pass"];
        md << "| " << k << " | " << (p.is_null() ? "not run" : (p.get<bool>() ? "PASS" : "FAIL")) << " |\n";
      }
      md << '\n';
    }
  }
  if (fs::exists(dir / "wave.json")) {
    const json w = read_json(dir / "wave.json");
    md << "## Wave\n\nk = " << fmt(w["k"]) << ", residual " << fmt(w["residual"], 3) << ", Newton iterations "
       << w["iterations"] << "\n\n";
  }
  if (fs::exists(dir / "spectrum.json")) {
    const json s = read_json(dir / "spectrum.json");
    md << "## Spectrum\n\nverdict " << s["verdict"].get<std::string>() << ", d = " << fmt(s["curvature_d"])
       << ", max Re at xi != 0: " << fmt(s["max_re_nonzero_xi"], 3) << "\n\n";
  }
  if (fs::exists(dir / "equivalence.json")) {
    const json e = read_json(dir / "equivalence.json");
    md << "## Equivalence corpus\n\nviolations: " << e["violations"] << " / " << e["samples"]
       << "  \nmax H^k constant: " << fmt(e["max_hk_constant"]) << " (refined grid " << fmt(e["max_hk_constant_refined"])
       << ")  \nmax round trip: " << fmt(e["max_roundtrip"], 3) << "\n\n";
  }
  if (fs::exists(dir / "damping.json")) {
    const json d = read_json(dir / "damping.json");
    md << "## Damping\n\n| variable | refine | feasible | best theta | C |\n|---|---|---|---|---|\n";
    for (const auto& r : d["runs"])
      md << "| " << r["variable"].get<std::string>() << " | " << r["refine"] << " | "
         << (r["nonempty"].get<bool>() ? "yes" : "no") << " | " << fmt(r["best_theta"]) << " | " << fmt(r["best_c"])
         << " |\n";
    md << "\n| variable | j | C1 linear | C1 quadratic | C2 | C3 | R1 match |\n|---|---|---|---|---|---|---|\n";
    for (const auto& r : d["residuals"])
      md << "| " << r["variable"].get<std::string>() << " | " << r["j"] << " | " << fmt(r["c1_linear"]) << " | "
         << fmt(r["c1_quadratic"]) << " | " << fmt(r["c2"]) << " | " << fmt(r["c3"]) << " | "
         << r["r1_bound_match"].get<std::string>() << " |\n";
    md << '\n';
  }
  for (const char* name : {"localized", "nonlocalized"}) {
    const fs::path p = dir / (std::string("asymptotics_") + name + ".json");
    if (!fs::exists(p)) continue;
    const json a = read_json(p);
    md << "## Decay rates, " << name << "\n\n| norm | fitted | predicted | verdict |\n|---|---|---|---|\n";
    for (const auto& f : a["fits"])
      md << "| " << f["name"].get<std::string>() << " | " << fmt(f["exponent"], 3) << " | " << fmt(f["predicted"], 3)
         << " | " << f["verdict"].get<std::string>() << " |\n";
    md << '\n';
  }
  if (fs::exists(dir / "contrast.json")) {
    const json c = read_json(dir / "contrast.json");
    md << "## Localized vs nonlocalized\n\n| norm | localized | nonlocalized |\n|---|---|---|\n";
    for (const auto& r : c["rows"])
      md << "| " << r["norm"].get<std::string>() << " | " << fmt(r["localized"], 3) << " | " << fmt(r["nonlocalized"], 3)
         << " |\n";
    md << "\n||gamma||_L2 growth under domain x" << fmt(c["length_ratio"]) << ": " << fmt(c["gamma_l2_growth"])
       << " at t = " << fmt(c["compare_time"]) << "\n\n";
  }
  if (fs::exists(dir / "plots")) {
    md << "## Plot data\n\n";
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir / "plots"))
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) md << "- " << f << '\n';
    md << '\n';
  }
  const std::string text = md.str();
  std::ofstream out(dir / "report.md");
  require(static_cast<bool>(out), ErrorKind::MissingArtifact, "cannot write report.md");
  out << text;
  return text;
}

}  // namespace lle
