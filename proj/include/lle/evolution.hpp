#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lle/error.hpp"
#include "lle/grid.hpp"
#include "lle/wave.hpp"

namespace lle {

struct FieldState {
  Grid grid;
  double time = 0.0;
  ComplexField psi;
};

/// Fourth-order exponential time differencing (ETDRK4) for
/// psi_t = -i beta psi_xx - (1 + i alpha) psi + i P(|psi|^2 psi) + F,
/// with the phi-functions evaluated by contour averages. In linearized mode the
/// state is the perturbation v and the stage term is i P(2|phi|^2 v + phi^2 conj(v)).
class Stepper {
 public:
  Stepper(const Grid& grid, const LleParams& params, double dt, bool linearized = false,
          ComplexField background = {});

  double dt() const noexcept { return dt_; }
  bool linearized() const noexcept { return linearized_; }

  /// Advances Fourier coefficients (normalized as in fft()) by one step.
  void advance(ComplexField& coeffs) const;
  ComplexField step(const ComplexField& values) const;

 private:
  ComplexField stage(const ComplexField& coeffs) const;

  Grid grid_;
  LleParams params_;
  double dt_;
  bool linearized_;
  ComplexField background_;
  RealField background_intensity_;
  ComplexField background_square_;
  Eigen::ArrayXd mask_;
  Eigen::ArrayXcd e_, e2_, q_, f1_, f2_, f3_;
};

FieldState step(const FieldState& state, double dt, const LleParams& params);

struct Trajectory {
  Grid grid;
  LleParams params;
  std::optional<PeriodicWave> wave;
  bool linearized = false;
  double dt = 0.0;
  int save_every = 1;
  std::vector<double> times;
  std::vector<ComplexField> states;

  void append(double t, ComplexField psi);
  std::size_t size() const noexcept { return times.size(); }
};

/// Thrown when the state turns non-finite; carries the trajectory saved so far.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, Trajectory partial)
      : Error(ErrorKind::BlowUp, what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

struct EvolveOptions {
  double t_final = 1.0;
  double dt = 1e-2;
  int save_every = 1;
  bool linearized = false;
};

/// Integrates from `initial` (psi values). With linearized set the wave must be given and the
/// flow is the pure A[phi] flow of psi - phi; saved states are always psi = phi + v.
Trajectory evolve(const FieldState& initial, const LleParams& params, const EvolveOptions& options,
                  const std::optional<PeriodicWave>& wave = std::nullopt);

enum class PerturbationKind { Localized, NonlocalizedPhase, RandomLocalized };
const char* to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& s);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::Localized;
  /// Max modulus of the added bump (localized kinds).
  double amplitude = 0.0;
  /// Gaussian width (localized kinds) or step width (nonlocalized phase).
  double width = 1.0;
  /// Bump center offset from the domain midpoint.
  double center_offset = 1.3;
  std::complex<double> direction{1.0, 0.5};
  std::pair<double, double> h0_limits{-0.1, 0.1};
  std::uint64_t seed = 1;
};

struct Perturbation {
  FieldState state;
  std::optional<RealField> h0;
  /// Midpoint of h0_limits removed by recentering (a translation of phi).
  double applied_shift = 0.0;
};

/// localized: phi + amplitude * direction * Gaussian; nonlocalized-phase: psi(x) = phi(x + h0(x))
/// with h0 a smoothed double step between the recentered limits (periodic realization);
/// random-localized: band-limited noise under a Gaussian envelope.
Perturbation make_perturbation(const PerturbationSpec& spec, const PeriodicWave& wave, const Grid& grid);

/// Smoothed step -c -> c at L/4 and back at 3L/4.
RealField smoothed_double_step(const Grid& grid, double c, double width);

/// Directory layout: metadata.json, index.csv, snapshots/snap_NNNNNN.bin.
void save_trajectory(const Trajectory& traj, const std::string& directory);
Trajectory load_trajectory(const std::string& directory);

}  // namespace lle
