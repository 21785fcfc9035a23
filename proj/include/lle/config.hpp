#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lle/damping.hpp"
#include "lle/evolution.hpp"
#include "lle/modulation.hpp"
#include "lle/wave.hpp"
#include "lle/whitham.hpp"

namespace lle {

/// One simulated perturbation run.
struct RunSpec {
  PerturbationKind kind = PerturbationKind::Localized;
  int periods = 256;
  double t_final = 1000.0;
  int save_every = 40;
  /// Localized amplitude as a multiple of sup|phi|.
  double amplitude_factor = 1e-3;
  double width = 1.0;
  double center_offset = 1.3;
  std::complex<double> direction{1.0, 0.5};
  std::pair<double, double> h0_limits{-0.1, 0.1};
};

struct ExperimentConfig {
  LleParams params{0.5, -1.0, 1.35};

  double k = 0.2;
  int points_per_period = 64;
  /// "coefficients" (seed_coefficients), "constant" (brightest constant state) or "relax"
  /// (evolve constant state + relax_amplitude cos for relax_time, then Newton).
  std::string wave_seed = "coefficients";
  /// (m, c_m) Fourier coefficients of the period-one seed.
  std::vector<std::pair<int, std::complex<double>>> seed_coefficients;
  double relax_time = 150.0;
  double relax_amplitude = 0.3;
  double newton_tol = 1e-12;
  int newton_max_iters = 50;

  int n_xi = 128;
  int n_modes = 64;
  double xi_fit_factor = 0.1;
  double delta_gap = 1e-3;

  double dt = 0.05;
  RunSpec localized;
  RunSpec nonlocalized;
  RunSpec damping;
  std::string evolve_run = "localized";

  int linear_periods = 8;
  int linear_xi_index = 2;
  double linear_t_final = 5.0;

  int j_max = 3;
  double theta_min = 1e-3;
  double theta_max = 4.0;
  int theta_points = 25;
  double c_min = 1e-4;
  double c_max = 1e4;
  int c_points = 81;
  int damping_refine = 2;
  double residual_t_final = 20.0;

  double eta = 0.1;
  double fit_t_min = 10.0;
  double fit_t_max = std::numeric_limits<double>::infinity();
  double fit_tolerance = 0.15;
  PhaseMethod phase_method = PhaseMethod::BlochProjection;
  int family_size = 21;
  int domain_factor = 2;
  double domain_compare_time = 200.0;

  std::size_t corpus_samples = 1000;
  CorpusOptions corpus;
  std::vector<double> corpus_p{2.0, 4.0, std::numeric_limits<double>::infinity()};

  std::uint64_t seed = 20241017;
  std::string output_dir = "stable";
  int jobs = 0;

  Grid grid_for(const RunSpec& run, int refine = 1) const;
  PerturbationSpec perturbation_for(const RunSpec& run, const PeriodicWave& wave) const;
  DampingOptions damping_options() const;
  AsymptoticsOptions asymptotics_options() const;
  PhaseOptions phase_options() const;
  const RunSpec& run(const std::string& name) const;
};

ExperimentConfig default_config();
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Merges `j` over the defaults; unknown keys and bad values are configuration errors.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Applies "a.b.c=value" (value parsed as JSON, falling back to a string).
void apply_override(ExperimentConfig& c, const std::string& assignment);
/// FNV-1a hash of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace lle
