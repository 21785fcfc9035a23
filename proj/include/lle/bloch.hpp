#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lle/wave.hpp"

namespace lle {

/// A[phi] = -Id + J L[phi] acting on (v_r, v_i), with J = (0, -1; 1, 0) and
/// L = (-beta d^2 - alpha + 3a^2 + b^2, 2ab; 2ab, -beta d^2 - alpha + a^2 + 3b^2), phi = a + ib.
class LinearizedOperator {
 public:
  explicit LinearizedOperator(PeriodicWave wave);

  const PeriodicWave& wave() const noexcept { return wave_; }

  /// Fourier coefficient m (any integer) of the potential entries q11, q12, q22 over one period.
  std::complex<double> potential_coeff(int entry, long m) const;

  /// L[phi] applied to (u_r, u_i) sampled on a grid holding whole periods.
  std::pair<RealField, RealField> apply_l(const Grid& grid, const RealField& ur, const RealField& ui) const;
  /// A[phi] applied to (u_r, u_i).
  std::pair<RealField, RealField> apply(const Grid& grid, const RealField& ur, const RealField& ui) const;

 private:
  PeriodicWave wave_;
  std::size_t fine_;
  ComplexField q11_, q12_, q22_;
};

/// Matrix of A restricted to e^{i xi x} times period-1/k functions, on Fourier modes
/// m = -n_modes/2 .. n_modes/2 - 1 for each of (v_r, v_i).
Eigen::MatrixXcd bloch_matrix(const LinearizedOperator& op, double xi, int n_modes);

/// Bloch modes m = -n/2..n/2-1 of a period-grid field, in the ordering used by bloch_matrix.
Eigen::VectorXcd bloch_coefficients(const ComplexField& period_values, int n_modes);

enum class Verdict { Stable, Unstable, Marginal };
const char* to_string(Verdict v);

struct StabilityOptions {
  double delta_gap = 1e-3;
  /// Fit window for the critical curve, as a multiple of k.
  double xi_fit_factor = 0.1;
  int fit_samples = 12;
  /// Positive real parts below this count as zero.
  double margin = 1e-10;
  int jobs = 0;
};

struct BlochSpectrum {
  double k = 0.0;
  std::vector<double> xi;
  /// Per xi, all eigenvalues sorted by decreasing real part.
  std::vector<Eigen::VectorXcd> eigenvalues;
  /// Per xi, index into eigenvalues of the critical curve.
  std::vector<int> critical_index;
  double lambda0 = 0.0;
  double gap = 0.0;
  double max_re_nonzero = 0.0;
  double curvature = 0.0;
  double fit_residual = 0.0;
  double cubic_constant = 0.0;
  double xi_fit = 0.0;
  Verdict verdict = Verdict::Marginal;
  std::string diagnostic;

  std::complex<double> critical(std::size_t i) const { return eigenvalues[i][critical_index[i]]; }
};

BlochSpectrum assess_stability(const LinearizedOperator& op, int n_xi, int n_modes,
                               const StabilityOptions& options = {});

/// theta_lin = -max Re lambda over all eigenvalues except the critical curve at |xi| < low_cut.
double high_freq_rate(const BlochSpectrum& spectrum, double low_cut);

struct CurvatureFit {
  double d = 0.0;
  double relative_residual = 0.0;
  double cubic_constant = 0.0;
  double lambda0 = 0.0;
  double gap = 0.0;
  std::vector<double> xi;
  std::vector<std::complex<double>> lambda;
};

/// Quadratic fit Re lambda_c(xi) = c0 - d xi^2 on 0 <= xi <= xi_fit, with the curve
/// continued from lambda_c(0) = 0 by eigenvector overlap.
CurvatureFit fit_critical_curve(const LinearizedOperator& op, double xi_fit, int n_modes,
                                int samples = 12);

/// Bloch curvature d(k) of a diffusively stable wave (physical x units).
double whitham_diffusion(const PeriodicWave& wave, double xi_fit, int n_modes = 64);

/// Adjoint translational mode on points_per_period samples: kernel of the transposed
/// steady Jacobian, normalized to mean(re(m) re(phi_x) + im(m) im(phi_x)) = 1.
ComplexField adjoint_translation_mode(const PeriodicWave& wave);

/// Bloch eigenpair with its eigenvector synthesized as e^{i xi x} p(x) on a grid.
struct BlochMode {
  std::complex<double> lambda;
  ComplexField field_r;
  ComplexField field_i;
};
/// Eigenpair at xi with the rank-th largest real part (rank 0 = least stable).
BlochMode bloch_mode(const LinearizedOperator& op, double xi, int n_modes, const Grid& grid, int rank = 0);

nlohmann::json spectrum_verdict_json(const BlochSpectrum& s);
void write_spectrum_csv(const BlochSpectrum& s, const std::string& path);

}  // namespace lle
