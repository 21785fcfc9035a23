#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lle/grid.hpp"

namespace lle {

struct LleParams {
  double alpha = 0.0;
  double beta = -1.0;
  double f_pump = 1.0;

  void validate() const;
};

/// Spatially constant steady states psi_c = F / (1 + i alpha - i rho), rho = |psi_c|^2,
/// ordered by increasing intensity.
std::vector<std::complex<double>> constant_states(const LleParams& params);

/// Steady periodic solution with wavenumber k, stored as the normalized Fourier
/// coefficients of its period-one profile: phi(x) = sum_m c_m exp(2 pi i m k x).
class PeriodicWave {
 public:
  PeriodicWave(LleParams params, double k, ComplexField coeffs, double residual = 0.0,
               int iterations = 0);

  const LleParams& params() const noexcept { return params_; }
  double k() const noexcept { return k_; }
  double period() const noexcept { return 1.0 / k_; }
  const ComplexField& coeffs() const noexcept { return coeffs_; }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }
  double residual_norm() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

  /// x-derivative of the given order sampled at points_per_period points of one period.
  ComplexField period_values(std::size_t points_per_period, int order = 0) const;
  ComplexField period_values() const { return period_values(modes(), 0); }
  /// Profile tiled over a grid holding an integer number of periods.
  ComplexField profile(const Grid& grid, int order = 0) const;
  std::size_t periods_on(const Grid& grid) const;
  std::complex<double> value(double x, int order = 0) const;
  double sup_norm() const;
  bool is_constant(double tol = 1e-12) const;

 private:
  LleParams params_;
  double k_;
  ComplexField coeffs_;
  double residual_;
  int iterations_;
};

/// -i beta phi'' - (1 + i alpha) phi + i P(|phi|^2 phi) + F on the period grid,
/// P the 2/3 dealiasing projector.
ComplexField steady_residual(const LleParams& params, double k, const ComplexField& values);
/// L2 norm over one period (physical units) of the steady residual.
double steady_residual_norm(const LleParams& params, double k, const ComplexField& values);
/// Real 2M x 2M Jacobian of the steady residual acting on (re, im) stacked values.
Eigen::MatrixXd steady_jacobian(const LleParams& params, double k, const ComplexField& values);

struct NewtonOptions {
  int max_iters = 50;
  double tol = 1e-12;
};

/// Newton iteration on the period grid. Translation is fixed by the bordering
/// constraint <phi_x^guess, phi - phi^guess> = 0 unless the guess is constant.
PeriodicWave solve_steady(const LleParams& params, double k, const ComplexField& initial_guess,
                          const NewtonOptions& options = {});

/// Shift a wave so that it is even about x = 0 with |phi| maximal there.
PeriodicWave center_wave(const PeriodicWave& wave);
/// Shift by a fraction of the period: returns the wave phi(x + s / k).
PeriodicWave shift_wave(const PeriodicWave& wave, double period_fraction);

/// d phi / d k at fixed period-one phase, from the gauge-fixed Newton system.
ComplexField wave_sensitivity(const PeriodicWave& wave);

struct ContinuationResult {
  std::vector<PeriodicWave> waves;
  std::optional<double> fold_k;
  std::string fold_report;
};

/// Predictor-corrector continuation from wave.k() to k_target in equal steps.
/// Returns the input alone when k_target equals the current wavenumber.
ContinuationResult continue_in_k(const PeriodicWave& wave, double k_target, int steps,
                                 const NewtonOptions& options = {});

/// Evaluates phi^kappa at period-one phase y for wavenumbers inside a continued family
/// by cubic interpolation of the Fourier coefficients in kappa.
class WaveFamily {
 public:
  explicit WaveFamily(std::vector<PeriodicWave> waves);
  double k_min() const { return ks_.front(); }
  double k_max() const { return ks_.back(); }
  std::size_t size() const { return ks_.size(); }
  /// phi^kappa at phase y (period one in y).
  std::complex<double> value(double kappa, double y) const;

 private:
  std::vector<double> ks_;
  std::vector<ComplexField> coeffs_;
};

/// Builds a family of n_waves waves spanning [k_lo, k_hi] around wave.k().
WaveFamily build_family(const PeriodicWave& wave, double k_lo, double k_hi, int n_waves);

void to_json(nlohmann::json& j, const LleParams& p);
void from_json(const nlohmann::json& j, LleParams& p);
nlohmann::json wave_to_json(const PeriodicWave& wave);
PeriodicWave wave_from_json(const nlohmann::json& j);

}  // namespace lle
