#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lle/evolution.hpp"
#include "lle/modulation.hpp"

namespace lle {

/// M[phi] = 2 (-2 a b, a^2 - b^2; a^2 - b^2, 2 a b) pointwise, phi = a + i b.
struct MMatrix {
  RealField m11, m12, m22;
};

MMatrix m_matrix(const RealField& phi_r, const RealField& phi_i);
MMatrix m_matrix(const ComplexField& phi);

/// ||d^j u||^2 - (1 / 2 beta) <J M d^{j-1} u, d^{j-1} u>; m == nullptr drops the M term.
double energy(const Grid& grid, const ComplexField& u, const MMatrix* m, int j, double beta);
double energy(const Grid& grid, const ComplexField& u, const ComplexField& phi, int j, double beta);

enum class DampingVariable { Unmodulated, Forward, Inverse };
const char* to_string(DampingVariable v);
DampingVariable damping_variable_from_string(const std::string& s);

/// Per-snapshot perturbation variable with the profile its energy is built on.
struct VariableSeries {
  DampingVariable variable = DampingVariable::Unmodulated;
  Grid grid;
  std::vector<double> times;
  std::vector<ComplexField> u;
  /// phi (unmodulated, inverse) or phi(x - gamma) (forward).
  std::vector<ComplexField> background;
  /// Empty for the unmodulated variable.
  std::vector<PhaseField> phases;
};

VariableSeries variable_series(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable,
                               const std::vector<PhaseField>& phases);

/// ||(gamma_x, gamma_t)||_{H^s} = (||gamma_x||_{H^s}^2 + ||gamma_t||_{H^s}^2)^{1/2}.
double phase_rate_norm(const Grid& grid, const PhaseField& phase, int s);

struct EnergyLedger {
  DampingVariable variable = DampingVariable::Unmodulated;
  int j_max = 3;
  std::vector<double> times;
  /// energies[j - 1][t]
  std::vector<std::vector<double>> energies;
  std::vector<double> l2;
  std::vector<double> hk;
  std::vector<double> gamma_rate;  // ||d_{x,t} gamma||_{H^{j_max+2}}
  std::vector<double> r1, r2, r3;  // magnitudes at j = j_max
  /// Energy-equivalence constants c, c' (see damping module docs).
  double equivalence_c = 0.0;
  double equivalence_c_prime = 0.0;
};

struct ResidualDecomposition {
  DampingVariable variable = DampingVariable::Unmodulated;
  int j = 1;
  std::vector<double> times;
  std::vector<double> energy;
  /// dE/dt + 2E from 4th-order differences of the energy series.
  std::vector<double> r_measured;
  /// dE/dt + 2E from the instantaneous right-hand side; equals r1 + r2 + r3.
  std::vector<double> r_analytic;
  std::vector<double> r1, r2, r3;
  std::vector<double> bound1_linear, bound1_quadratic, bound2, bound3;
  double c1_linear = 0.0;
  double c1_quadratic = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  /// Log-log slope of |R1| against ||d^{j-1}u|| + ||u|| over time (1: linear bound, 2: quadratic).
  double r1_scaling_slope = 0.0;
  std::string r1_bound_match;
  /// max |r_measured - r_analytic| / max |r_analytic|.
  double differencing_error = 0.0;
};

/// Splits dE_j/dt + 2E_j into the bilinear part R1, the nonlinear part R2 and the
/// phase-forced part R3 (forward variable only), with smallest constants against the bounds.
ResidualDecomposition residual_decomposition(const Trajectory& traj, const PeriodicWave& wave,
                                             DampingVariable variable, int j,
                                             const std::vector<PhaseField>& phases = {},
                                             double max_differencing_error = 0.01);

struct DampingOptions {
  int j_max = 3;
  std::vector<double> theta_scan;
  double c_lo = 1e-4;
  double c_hi = 1e4;
  int c_points = 81;
};

std::vector<double> default_theta_scan();

struct DampingReport {
  DampingVariable variable = DampingVariable::Unmodulated;
  int j_max = 3;
  std::vector<double> times;
  /// Left side X(t): E_{j_max} (unmodulated) or ||u||_{H^k}^2.
  std::vector<double> lhs;
  /// Integrand of the memory term.
  std::vector<double> forcing;
  /// Instantaneous ||d_x gamma||_{H^{k+1}}^2 term (inverse only).
  std::vector<double> instantaneous;
  std::vector<double> theta;
  /// Smallest C (exact) per theta; infinity when no finite C works.
  std::vector<double> c_min;
  /// Smallest scan-grid C >= c_min per theta, or NaN when above the scan range.
  std::vector<double> c_grid;
  std::vector<bool> feasible;
  bool nonempty = false;
  double best_theta = 0.0;
  double best_c = 0.0;
  /// RHS - LHS at (best_theta, best_c) per time.
  std::vector<double> slack;
  double max_hk = 0.0;
  double max_gamma_rate = 0.0;
  /// Left-side values below (1e-10 ||phi||_{H^k})^2 count as round-off zeros.
  double noise_floor = 0.0;
};

DampingReport damping_report(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable,
                             const DampingOptions& options, const std::vector<PhaseField>& phases = {});

/// Integral-form check at one (theta, C) on saved times (trapezoid memory integral).
bool integral_form_holds(const DampingReport& report, double theta, double c);
/// Differential-form check dX/dt <= -theta X + C F at all saved times (4th-order differences).
bool differential_form_holds(const DampingReport& report, double theta, double c);

EnergyLedger energy_ledger(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable, int j_max,
                           const std::vector<PhaseField>& phases = {});

std::vector<double> time_derivative(const std::vector<double>& times, const std::vector<double>& values);

nlohmann::json to_json(const DampingReport& r);
nlohmann::json to_json(const ResidualDecomposition& r);
void write_slack_csv(const DampingReport& r, const std::string& path);
void write_ledger_csv(const EnergyLedger& ledger, const std::string& path);
void write_residual_csv(const ResidualDecomposition& r, const std::string& path);

}  // namespace lle
