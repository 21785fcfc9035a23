#include "lle/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lle/error.hpp"

namespace lle {

namespace {

using nlohmann::json;

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json run_to_json(const RunSpec& r) {
  return {{"kind", to_string(r.kind)},
          {"periods", r.periods},
          {"t_final", r.t_final},
          {"save_every", r.save_every},
          {"amplitude_factor", r.amplitude_factor},
          {"width", r.width},
          {"center_offset", r.center_offset},
          {"direction", {r.direction.real(), r.direction.imag()}},
          {"h0_limits", {r.h0_limits.first, r.h0_limits.second}}};
}

RunSpec run_from_json(const json& j) {
  RunSpec r;
  r.kind = perturbation_kind_from_string(j.at("kind").get<std::string>());
  r.periods = j.at("periods").get<int>();
  r.t_final = j.at("t_final").get<double>();
  r.save_every = j.at("save_every").get<int>();
  r.amplitude_factor = j.at("amplitude_factor").get<double>();
  r.width = j.at("width").get<double>();
  r.center_offset = j.at("center_offset").get<double>();
  const auto d = j.at("direction");
  r.direction = {d.at(0).get<double>(), d.at(1).get<double>()};
  const auto h = j.at("h0_limits");
  r.h0_limits = {h.at(0).get<double>(), h.at(1).get<double>()};
  require(r.periods >= 1 && r.t_final > 0.0 && r.save_every >= 1 && r.width > 0.0, ErrorKind::Configuration,
          "run spec needs periods >= 1, t_final > 0, save_every >= 1, width > 0");
  return r;
}

void merge_checked(json& base, const json& patch, const std::string& path) {
  require(patch.is_object(), ErrorKind::Configuration, "config section '" + path + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    require(base.contains(it.key()), ErrorKind::Configuration, "unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) merge_checked(slot, it.value(), key);
    else slot = it.value();
  }
}

double p_from_json(const json& v) {
  if (v.is_string()) {
    require(v.get<std::string>() == "inf", ErrorKind::Configuration, "p values are numbers or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  return v.get<double>();
}

}  // namespace

Grid ExperimentConfig::grid_for(const RunSpec& r, int refine) const {
  const auto n = static_cast<std::size_t>(r.periods) * static_cast<std::size_t>(points_per_period * refine);
  return Grid(n, r.periods / k);
}

PerturbationSpec ExperimentConfig::perturbation_for(const RunSpec& r, const PeriodicWave& wave) const {
  PerturbationSpec s;
  s.kind = r.kind;
  s.amplitude = r.amplitude_factor * wave.sup_norm();
  s.width = r.width;
  s.center_offset = r.center_offset;
  s.direction = r.direction;
  s.h0_limits = r.h0_limits;
  s.seed = seed;
  return s;
}

DampingOptions ExperimentConfig::damping_options() const {
  DampingOptions o;
  o.j_max = j_max;
  o.theta_scan.resize(static_cast<std::size_t>(theta_points));
  for (int i = 0; i < theta_points; ++i)
    o.theta_scan[static_cast<std::size_t>(i)] =
        theta_points == 1 ? theta_max : theta_min * std::pow(theta_max / theta_min, i / double(theta_points - 1));
  o.c_lo = c_min;
  o.c_hi = c_max;
  o.c_points = c_points;
  return o;
}

AsymptoticsOptions ExperimentConfig::asymptotics_options() const {
  AsymptoticsOptions o;
  o.eta = eta;
  o.t_min = fit_t_min;
  o.t_max = fit_t_max;
  o.tolerance = fit_tolerance;
  o.family_size = family_size;
  return o;
}

PhaseOptions ExperimentConfig::phase_options() const {
  PhaseOptions o;
  o.method = phase_method;
  return o;
}

const RunSpec& ExperimentConfig::run(const std::string& name) const {
  if (name == "localized") return localized;
  if (name == "nonlocalized") return nonlocalized;
  if (name == "damping") return damping;
  throw Error(ErrorKind::Configuration, "unknown run '" + name + "' (localized, nonlocalized, damping)");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  // Rounded Fourier coefficients of the stable k = 0.2 wave; Newton polishes them.
  const std::vector<std::complex<double>> half = {
      {0.821, 0.524}, {0.027, 0.278}, {0.017, 0.036}, {0.002, 0.005}, {0.0, 0.001}};
  for (int m = -4; m <= 4; ++m) c.seed_coefficients.push_back({m, half[static_cast<std::size_t>(std::abs(m))]});
  c.localized = RunSpec{};
  c.nonlocalized = RunSpec{};
  c.nonlocalized.kind = PerturbationKind::NonlocalizedPhase;
  c.nonlocalized.width = 5.0;
  c.damping = RunSpec{};
  c.damping.periods = 64;
  c.damping.t_final = 200.0;
  c.damping.save_every = 5;
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json seed = json::array();
  for (const auto& [m, z] : c.seed_coefficients) seed.push_back({m, z.real(), z.imag()});
  json p = json::array();
  for (double v : c.corpus_p) p.push_back(std::isfinite(v) ? json(v) : json("inf"));
  return {
      {"lle", {{"alpha", c.params.alpha}, {"beta", c.params.beta}, {"f_pump", c.params.f_pump}}},
      {"wave",
       {{"k", c.k},
        {"points_per_period", c.points_per_period},
        {"seed", c.wave_seed},
        {"seed_coefficients", seed},
        {"relax_time", c.relax_time},
        {"relax_amplitude", c.relax_amplitude},
        {"newton_tol", c.newton_tol},
        {"newton_max_iters", c.newton_max_iters}}},
      {"spectrum",
       {{"n_xi", c.n_xi}, {"n_modes", c.n_modes}, {"xi_fit_factor", c.xi_fit_factor}, {"delta_gap", c.delta_gap}}},
      {"integrator", {{"dt", c.dt}}},
      {"runs",
       {{"localized", run_to_json(c.localized)},
        {"nonlocalized", run_to_json(c.nonlocalized)},
        {"damping", run_to_json(c.damping)}}},
      {"evolve_run", c.evolve_run},
      {"linear_rate",
       {{"periods", c.linear_periods}, {"xi_index", c.linear_xi_index}, {"t_final", c.linear_t_final}}},
      {"damping",
       {{"j_max", c.j_max},
        {"theta_min", c.theta_min},
        {"theta_max", c.theta_max},
        {"theta_points", c.theta_points},
        {"c_min", c.c_min},
        {"c_max", c.c_max},
        {"c_points", c.c_points},
        {"refine", c.damping_refine},
        {"residual_t_final", c.residual_t_final}}},
      {"whitham",
       {{"eta", c.eta},
        {"t_min", c.fit_t_min},
        {"t_max", num_or_null(c.fit_t_max)},
        {"tolerance", c.fit_tolerance},
        {"phase_method", to_string(c.phase_method)},
        {"family_size", c.family_size},
        {"domain_factor", c.domain_factor},
        {"domain_compare_time", c.domain_compare_time}}},
      {"equivalence",
       {{"samples", c.corpus_samples},
        {"n_points", c.corpus.n_points},
        {"length", c.corpus.length},
        {"max_mode", c.corpus.max_mode},
        {"max_gx", c.corpus.max_gx},
        {"hk_gamma_bound", c.corpus.hk_gamma_bound},
        {"hk_order", c.corpus.hk_order},
        {"p_values", p}}},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"jobs", c.jobs}};
}

ExperimentConfig config_from_json(const json& patch) {
  json j = config_to_json(default_config());
  merge_checked(j, patch, "");
  try {
    ExperimentConfig c;
    const auto& l = j.at("lle");
    c.params = {l.at("alpha").get<double>(), l.at("beta").get<double>(), l.at("f_pump").get<double>()};
    c.params.validate();
    const auto& w = j.at("wave");
    c.k = w.at("k").get<double>();
    c.points_per_period = w.at("points_per_period").get<int>();
    c.wave_seed = w.at("seed").get<std::string>();
    for (const auto& e : w.at("seed_coefficients"))
      c.seed_coefficients.push_back({e.at(0).get<int>(), {e.at(1).get<double>(), e.at(2).get<double>()}});
    c.relax_time = w.at("relax_time").get<double>();
    c.relax_amplitude = w.at("relax_amplitude").get<double>();
    c.newton_tol = w.at("newton_tol").get<double>();
    c.newton_max_iters = w.at("newton_max_iters").get<int>();
    const auto& s = j.at("spectrum");
    c.n_xi = s.at("n_xi").get<int>();
    c.n_modes = s.at("n_modes").get<int>();
    c.xi_fit_factor = s.at("xi_fit_factor").get<double>();
    c.delta_gap = s.at("delta_gap").get<double>();
    c.dt = j.at("integrator").at("dt").get<double>();
    c.localized = run_from_json(j.at("runs").at("localized"));
    c.nonlocalized = run_from_json(j.at("runs").at("nonlocalized"));
    c.damping = run_from_json(j.at("runs").at("damping"));
    c.evolve_run = j.at("evolve_run").get<std::string>();
    const auto& lr = j.at("linear_rate");
    c.linear_periods = lr.at("periods").get<int>();
    c.linear_xi_index = lr.at("xi_index").get<int>();
    c.linear_t_final = lr.at("t_final").get<double>();
    const auto& d = j.at("damping");
    c.j_max = d.at("j_max").get<int>();
    c.theta_min = d.at("theta_min").get<double>();
    c.theta_max = d.at("theta_max").get<double>();
    c.theta_points = d.at("theta_points").get<int>();
    c.c_min = d.at("c_min").get<double>();
    c.c_max = d.at("c_max").get<double>();
    c.c_points = d.at("c_points").get<int>();
    c.damping_refine = d.at("refine").get<int>();
    c.residual_t_final = d.at("residual_t_final").get<double>();
    const auto& wh = j.at("whitham");
    c.eta = wh.at("eta").get<double>();
    c.fit_t_min = wh.at("t_min").get<double>();
    c.fit_t_max = wh.at("t_max").is_null() ? std::numeric_limits<double>::infinity() : wh.at("t_max").get<double>();
    c.fit_tolerance = wh.at("tolerance").get<double>();
    c.phase_method = phase_method_from_string(wh.at("phase_method").get<std::string>());
    c.family_size = wh.at("family_size").get<int>();
    c.domain_factor = wh.at("domain_factor").get<int>();
    c.domain_compare_time = wh.at("domain_compare_time").get<double>();
    const auto& e = j.at("equivalence");
    c.corpus_samples = e.at("samples").get<std::size_t>();
    c.corpus.n_points = e.at("n_points").get<std::size_t>();
    c.corpus.length = e.at("length").get<double>();
    c.corpus.max_mode = e.at("max_mode").get<int>();
    c.corpus.max_gx = e.at("max_gx").get<double>();
    c.corpus.hk_gamma_bound = e.at("hk_gamma_bound").get<double>();
    c.corpus.hk_order = e.at("hk_order").get<int>();
    c.corpus_p.clear();
    for (const auto& v : e.at("p_values")) c.corpus_p.push_back(p_from_json(v));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.jobs = j.at("jobs").get<int>();

    require(c.k > 0.0, ErrorKind::Configuration, "wave.k must be positive");
    require(c.points_per_period >= 8 && (c.points_per_period & (c.points_per_period - 1)) == 0,
            ErrorKind::Configuration, "wave.points_per_period must be a power of two >= 8");
    require(c.wave_seed == "coefficients" || c.wave_seed == "constant" || c.wave_seed == "relax",
            ErrorKind::Configuration, "wave.seed must be coefficients, constant or relax");
    require(c.dt > 0.0, ErrorKind::Configuration, "integrator.dt must be positive");
    require(c.n_xi >= 64 && c.n_modes >= 32 && c.n_modes % 2 == 0, ErrorKind::Configuration,
            "spectrum needs n_xi >= 64 and even n_modes >= 32");
    require(c.j_max >= 1 && c.j_max <= 3, ErrorKind::Configuration, "damping.j_max must lie in 1..3");
    require(c.theta_min > 0.0 && c.theta_max >= c.theta_min && c.theta_points >= 1, ErrorKind::Configuration,
            "bad theta scan");
    require(c.c_min > 0.0 && c.c_max > c.c_min && c.c_points >= 2, ErrorKind::Configuration, "bad C scan");
    require(c.damping_refine >= 1 && c.domain_factor >= 1, ErrorKind::Configuration,
            "refinement factors must be >= 1");
    require(c.linear_periods >= 1 && c.linear_t_final > 0.0, ErrorKind::Configuration, "bad linear_rate section");
    (void)c.run(c.evolve_run);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("bad config value: ") + e.what());
  } catch (const Error& e) {
    if (is_configuration_error(e.kind())) throw Error(ErrorKind::Configuration, e.what());
    throw Error(ErrorKind::Configuration, std::string("bad config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::Configuration, "cannot open config " + path);
  json j;
  try {
    j = json::parse(f, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Configuration, "cannot parse " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::Configuration, "override must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json patch = json::object();
  json* cursor = &patch;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) cursor = &(*cursor)[parts[i]];
  (*cursor)[parts.back()] = value;
  json full = config_to_json(c);
  merge_checked(full, patch, "");
  c = config_from_json(full);
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lle
