#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lle/evolution.hpp"
#include "lle/grid.hpp"
#include "lle/wave.hpp"

namespace lle {

enum class ShiftDirection { Forward, Backward };

/// forward: f(x + gamma(x)); backward: f(x - gamma(x)); by band-limited interpolation.
ComplexField compose_shift(const Grid& grid, const ComplexField& f, const RealField& gamma, ShiftDirection direction);
RealField compose_shift(const Grid& grid, const RealField& f, const RealField& gamma, ShiftDirection direction);

struct InversionOptions {
  double tol = 1e-12;
  int max_iters = 100;
};

/// gamma_tilde with (Id - gamma)^{-1} = Id + gamma_tilde, from gamma_tilde = gamma o (Id + gamma_tilde).
RealField invert_coordinate(const Grid& grid, const RealField& gamma, const InversionOptions& options = {});

/// sup_x |gamma_tilde(x) - gamma(x + gamma_tilde(x))| on the grid.
double inversion_defect(const Grid& grid, const RealField& gamma, const RealField& gamma_tilde);

struct PhaseField {
  RealField gamma;
  RealField gamma_x;
  RealField gamma_t;
  double sup_gx = 0.0;
};

PhaseField make_phase(const Grid& grid, RealField gamma);

enum class PhaseMethod { BlochProjection, WindowedXcorr };
const char* to_string(PhaseMethod m);
PhaseMethod phase_method_from_string(const std::string& s);

struct PhaseOptions {
  PhaseMethod method = PhaseMethod::BlochProjection;
  /// Low-pass cutoff as a multiple of the base angular wavenumber 2 pi k.
  double xi_cut_factor = 0.2;
  /// Maximum allowed sup |psi - phi| as a multiple of sup |phi|.
  double threshold = 0.5;
  double tol = 1e-12;
  int max_iters = 60;
};

/// Precomputed data for repeated phase extraction against one wave on one grid.
class PhaseExtractor {
 public:
  PhaseExtractor(const PeriodicWave& wave, const Grid& grid, PhaseOptions options = {});

  /// `warm_start` seeds the bloch-projection iteration (e.g. the previous snapshot's gamma).
  PhaseField extract(const ComplexField& psi, const RealField* warm_start = nullptr) const;
  const Grid& grid() const noexcept { return grid_; }
  const ComplexField& profile() const noexcept { return phi_; }
  const PhaseOptions& options() const noexcept { return options_; }

 private:
  RealField bloch_projection(const ComplexField& psi, const RealField* warm_start) const;
  RealField windowed_xcorr(const ComplexField& psi) const;
  RealField lowpass(const RealField& g) const;

  PeriodicWave wave_;
  Grid grid_;
  PhaseOptions options_;
  ComplexField phi_;
  ComplexField adjoint_;
  Eigen::ArrayXd taper_;
  std::size_t periods_;
  double sup_phi_;
};

PhaseField extract_phase(const FieldState& state, const PeriodicWave& wave, const PhaseOptions& options = {});

/// Phases for every snapshot, with gamma_t by centered differences (one-sided at the ends).
std::vector<PhaseField> phase_series(const Trajectory& traj, const PeriodicWave& wave, const PhaseOptions& options = {});

struct ModulatedPair {
  ComplexField v_inverse;
  ComplexField v_forward;
  PhaseField phase;
};

ModulatedPair modulated_pair(const Grid& grid, const ComplexField& psi, const ComplexField& phi, const PhaseField& phase);

/// Norms of Lemma-type inequalities relating psi o (Id - gamma) - phi with psi - phi o (Id + gamma_tilde)
/// and psi - phi o (Id + gamma). Only norms of phi_x, gamma and gamma_x enter the bounds.
struct LpEquivalenceReport {
  double p = 2.0;
  double sup_gx = 0.0;
  double sup_phix = 0.0;
  double sup_gamma = 0.0;
  double lp_gx = 0.0;
  /// ||psi o (Id - gamma) - phi||_p
  double base = 0.0;
  /// ||psi - phi o (Id - gamma)^{-1}||_p
  double inverse_lhs = 0.0;
  /// ||psi - phi o (Id + gamma)||_p
  double shifted_lhs = 0.0;
  double correction = 0.0;
  /// Slacks (rhs - lhs for upper bounds, lhs - rhs for lower bounds).
  double slack_upper_inverse = 0.0;
  double slack_upper_shifted = 0.0;
  double slack_lower_inverse = 0.0;
  double slack_lower_shifted = 0.0;
  /// Lower bounds with the (1 - g)^{-1/p} prefactor; informational only.
  double slack_lower_inverse_printed = 0.0;
  double slack_lower_shifted_printed = 0.0;
  bool violation = false;
};

LpEquivalenceReport check_equivalence_lp(const Grid& grid, const ComplexField& psi, const ComplexField& phi,
                                         const RealField& gamma, double p);

struct HkEquivalenceReport {
  int k = 0;
  double base = 0.0;          // ||psi o (Id - gamma) - phi||_{H^k}
  double shifted_lhs = 0.0;   // ||psi - phi o (Id + gamma)||_{H^k}
  double gamma_term = 0.0;    // ||gamma_x||_{H^{k+1}}
  double constant = 1.0;      // smallest C >= 1 making both bounds hold
};

HkEquivalenceReport check_equivalence_hk(const Grid& grid, const ComplexField& psi, const ComplexField& phi,
                                         const RealField& gamma, int k);

struct EquivalenceSample {
  ComplexField psi;
  ComplexField phi;
  RealField gamma;
};

struct CorpusOptions {
  std::size_t n_points = 256;
  double length = 16.0;
  int max_mode = 6;
  double max_gx = 0.5;
  /// When positive, gamma is further scaled so that ||gamma_x||_{H^{k+1}} <= this.
  double hk_gamma_bound = 0.0;
  int hk_order = 2;
};

/// Deterministic random (psi, phi, gamma) for sample `id`, sampled on n_points (fields are
/// band-limited, so any resolution represents the same functions).
EquivalenceSample make_equivalence_sample(std::uint64_t seed, std::uint64_t id, const CorpusOptions& options,
                                          std::size_t n_points);

struct CorpusResult {
  std::vector<LpEquivalenceReport> lp;
  std::vector<HkEquivalenceReport> hk;
  std::vector<double> roundtrip_error;
  std::size_t violations = 0;
  double max_hk_constant = 0.0;
  double max_roundtrip = 0.0;
};

CorpusResult run_equivalence_corpus(std::uint64_t seed, std::size_t samples, const std::vector<double>& p_values,
                                    const CorpusOptions& options, std::size_t n_points, int jobs = 0);

nlohmann::json to_json(const LpEquivalenceReport& r);
void write_lp_csv(const std::vector<LpEquivalenceReport>& reports, std::size_t per_sample, const std::string& path);
void write_hk_csv(const std::vector<HkEquivalenceReport>& reports, const std::string& path);

}  // namespace lle
