#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "lle/config.hpp"
#include "lle/fft.hpp"
#include "lle/grid.hpp"
#include "lle/wave.hpp"

namespace test {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// The shipped stable wave (alpha 0.5, beta -1, F 1.35, k 0.2), solved once per process.
inline const lle::PeriodicWave& stable_wave() {
  static const lle::PeriodicWave wave = [] {
    const lle::ExperimentConfig c = lle::default_config();
    const int m = c.points_per_period;
    lle::ComplexField coeffs = lle::ComplexField::Zero(m);
    for (const auto& [mode, z] : c.seed_coefficients) coeffs[(mode + m) % m] = z;
    return lle::center_wave(lle::solve_steady(c.params, c.k, lle::ifft(coeffs)));
  }();
  return wave;
}

/// Band-limited random complex field with modes |j| <= max_mode.
inline lle::ComplexField random_field(std::size_t n, int max_mode, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  lle::ComplexField c = lle::ComplexField::Zero(static_cast<Eigen::Index>(n));
  for (int j = -max_mode; j <= max_mode; ++j)
    c[(j + static_cast<long>(n)) % static_cast<long>(n)] = {g(rng) / (1.0 + j * j), g(rng) / (1.0 + j * j)};
  return lle::ifft(c);
}

inline lle::ComplexField sample(const lle::Grid& grid, auto&& f) {
  lle::ComplexField v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(grid.x(i));
  return v;
}

template <class Derived>
double max_abs(const Eigen::DenseBase<Derived>& f) {
  return f.derived().array().abs().maxCoeff();
}

}  // namespace test
