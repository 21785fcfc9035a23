#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

#include <Eigen/Dense>

namespace lle {

using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;

/// Uniform periodic grid on [0, length) with a power-of-two number of points.
class Grid {
 public:
  Grid(std::size_t n_points, double length);

  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double x(std::size_t i) const noexcept { return spacing() * static_cast<double>(i); }
  RealField coordinates() const;

  /// Angular wavenumbers 2 pi j / length in FFT ordering.
  const RealField& wavenumbers() const noexcept { return *wavenumbers_; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  std::size_t n_;
  double length_;
  std::shared_ptr<const RealField> wavenumbers_;
};

/// Spectral kernels that work on any periodic sample count. The Grid-based API
/// below adds the Grid invariants on top.
namespace spectral {

RealField wavenumbers(std::size_t n, double length);

ComplexField derivative(const ComplexField& f, double length, int order);
RealField derivative(const RealField& f, double length, int order);

/// 1 for retained modes |j| < n/3, 0 otherwise.
Eigen::ArrayXd dealias_mask(std::size_t n);
ComplexField dealias(const ComplexField& f);

/// Trigonometric resampling to n_new points (zero padding or truncation).
ComplexField resample(const ComplexField& f, std::size_t n_new);
RealField resample(const RealField& f, std::size_t n_new);

/// Periodic antiderivative of the zero-mean part; the mean is returned separately.
RealField antiderivative(const RealField& f, double length, double* mean = nullptr);

}  // namespace spectral

void check_finite(const ComplexField& f, std::string_view what);
void check_finite(const RealField& f, std::string_view what);
void check_on_grid(const Grid& grid, Eigen::Index n, std::string_view what);

ComplexField derivative(const Grid& grid, const ComplexField& f, int order);
RealField derivative(const Grid& grid, const RealField& f, int order);

/// (sum_{j<=k} ||d^j f||_{L2}^2)^{1/2} with rectangle-rule L2.
double sobolev_norm(const Grid& grid, const ComplexField& f, int k);
double sobolev_norm(const Grid& grid, const RealField& f, int k);

/// Rectangle-rule L^p norm for finite p >= 1; grid max-modulus for p = infinity.
double lp_norm(const Grid& grid, const ComplexField& f, double p);
double lp_norm(const Grid& grid, const RealField& f, double p);

/// Real L2 inner product <f, g> = h sum f g.
double inner(const Grid& grid, const RealField& f, const RealField& g);
/// Real inner product of complex fields viewed as (re, im) pairs.
double inner(const Grid& grid, const ComplexField& f, const ComplexField& g);

/// Off-grid evaluation of a band-limited periodic field: the trigonometric
/// interpolant is sampled on an 8x oversampled grid and evaluated with
/// 16-point Lagrange interpolation (relative error ~1e-13 for dealiased data).
class PeriodicInterpolant {
 public:
  PeriodicInterpolant(const ComplexField& values, double length, int oversample = 8,
                      int stencil = 16);

  std::complex<double> operator()(double x) const;
  /// Evaluate at x_i + shift_i for every grid point x_i of the original field.
  ComplexField at_shifted_grid(const RealField& shift) const;

  double length() const noexcept { return length_; }

 private:
  ComplexField fine_;
  double length_;
  double fine_spacing_;
  std::size_t coarse_n_;
  int stencil_;
  Eigen::ArrayXd barycentric_;
};

}  // namespace lle
