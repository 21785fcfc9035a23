#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "lle/damping.hpp"
#include "lle/modulation.hpp"
#include "lle/wave.hpp"

namespace lle {

/// Heat flow k_t = diffusion * k_xx of the wavenumber perturbation, with h_x = k / k_star.
struct WhithamRun {
  Grid grid;
  double k_star = 0.0;
  double diffusion = 0.0;
  RealField k0;
  std::vector<double> times;
  std::vector<RealField> k;
  std::vector<RealField> h;
};

/// Exact Fourier-multiplier solution. h is anchored by its spatial mean, which the flow conserves.
WhithamRun solve_heat(const Grid& grid, const RealField& k0, double diffusion, const std::vector<double>& times,
                      double k_star, double h_mean = 0.0);

/// Run started from a phase profile h0: k0 = k_star * h0_x, mean(h) = mean(h0).
WhithamRun solve_heat_from_phase(const Grid& grid, const RealField& h0, double diffusion,
                                 const std::vector<double>& times, double k_star);

enum class FitMode { Within, AtMost };

struct DecayFit {
  std::string name;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
  double exponent = 0.0;
  double std_error = 0.0;
  double residual = 0.0;  // rms of log residuals
  double prefactor = 0.0;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.15;
  FitMode mode = FitMode::Within;
  bool pass = true;

  std::string verdict() const;
};

/// Least squares of log(value) against log(1 + t) over t_min <= t <= t_max.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_min = 10.0,
                   double t_max = std::numeric_limits<double>::infinity(), std::string name = {});
/// Same, with a verdict against `predicted` (|e - p| <= tol, or e <= p + tol for AtMost).
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_min, double t_max,
                   std::string name, double predicted, double tolerance, FitMode mode);

struct NormSeries {
  std::string name;
  double p = 2.0;
  std::vector<double> values;
};

struct AsymptoticsOptions {
  double eta = 0.1;
  double t_min = 10.0;
  double t_max = std::numeric_limits<double>::infinity();
  double tolerance = 0.15;
  int family_size = 21;
  /// Family span k_star * (1 +- family_margin * max|gamma_x|).
  double family_margin = 1.5;
};

struct AsymptoticsReport {
  double k_star = 0.0;
  LleParams params;
  double length = 0.0;
  std::vector<double> times;
  std::vector<NormSeries> series;
  std::vector<DecayFit> fits;

  const NormSeries& find(const std::string& name) const;
  const DecayFit& fit(const std::string& name) const;
  /// Value of a series at the saved time closest to t.
  double at(const std::string& name, double t) const;
};

/// Phase convention: psi(x + gamma) ~ phi, so the theorem phase is -gamma. Compares
/// psi(x + gamma) - phi^{kappa}, kappa = k_star (1 - gamma_x); -k_star gamma_x - k; -gamma - h;
/// together with the plain norms of v, v-tilde, gamma, gamma_x, k, h.
AsymptoticsReport compare_asymptotics(const Trajectory& traj, const std::vector<PhaseField>& phases,
                                      const PeriodicWave& wave, const WhithamRun& run,
                                      const AsymptoticsOptions& options = {});

/// Fits every series of a report (names carry their own predicted exponents).
void fit_report(AsymptoticsReport& report, const AsymptoticsOptions& options, bool localized);

struct ContrastRow {
  std::string norm;
  double localized = 0.0;
  double nonlocalized = 0.0;
};

struct ContrastReport {
  std::vector<ContrastRow> rows;
  double compare_time = 0.0;
  double gamma_l2_small = 0.0;
  double gamma_l2_large = 0.0;
  double length_ratio = 0.0;
  double gamma_l2_growth = 0.0;
  bool domain_divergent = false;
};

/// `nonloc_large` is the nonlocalized run on a longer domain (may be null).
ContrastReport localized_vs_nonlocalized(const AsymptoticsReport& loc, const AsymptoticsReport& nonloc,
                                         const AsymptoticsReport* nonloc_large = nullptr,
                                         double compare_time = std::numeric_limits<double>::quiet_NaN());

nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const AsymptoticsReport& r);
nlohmann::json to_json(const ContrastReport& r);
/// Writes <dir>/<series>.csv (t, norm) and <dir>/<series>_loglog.csv (log(1+t), log norm).
void write_plot_data(const AsymptoticsReport& r, const std::string& directory);
void write_whitham_csv(const WhithamRun& run, const std::string& path);

}  // namespace lle
