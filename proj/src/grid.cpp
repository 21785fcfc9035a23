#include "lle/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lle/error.hpp"
#include "lle/fft.hpp"

namespace lle {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

long signed_mode(std::size_t j, std::size_t n) {
  const auto jl = static_cast<long>(j);
  return j <= n / 2 ? jl : jl - static_cast<long>(n);
}

}  // namespace

Grid::Grid(std::size_t n_points, double length) : n_(n_points), length_(length) {
  require(n_points >= 64 && is_power_of_two(n_points), ErrorKind::Parameter,
          "grid needs a power-of-two point count >= 64, got " + std::to_string(n_points));
  require(std::isfinite(length) && length > 0, ErrorKind::Parameter, "grid length must be positive");
  wavenumbers_ = std::make_shared<const RealField>(spectral::wavenumbers(n_, length_));
}

RealField Grid::coordinates() const {
  RealField x(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) x[static_cast<Eigen::Index>(i)] = this->x(i);
  return x;
}

namespace spectral {

RealField wavenumbers(std::size_t n, double length) {
  RealField q(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    q[static_cast<Eigen::Index>(j)] =
        2.0 * std::numbers::pi * static_cast<double>(signed_mode(j, n)) / length;
  return q;
}

ComplexField derivative(const ComplexField& f, double length, int order) {
  if (order == 0) return f;
  const auto n = static_cast<std::size_t>(f.size());
  const RealField q = wavenumbers(n, length);
  ComplexField c = fft(f);
  const std::complex<double> iunit(0.0, 1.0);
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= std::pow(iunit * q[j], order);
  if (order % 2 == 1) c[static_cast<Eigen::Index>(n / 2)] = 0.0;
  return ifft(c);
}

RealField derivative(const RealField& f, double length, int order) {
  return derivative(ComplexField(f.cast<std::complex<double>>()), length, order).real();
}

Eigen::ArrayXd dealias_mask(std::size_t n) {
  Eigen::ArrayXd mask(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    mask[static_cast<Eigen::Index>(j)] = 3 * std::abs(signed_mode(j, n)) < static_cast<long>(n) ? 1.0 : 0.0;
  return mask;
}

ComplexField dealias(const ComplexField& f) {
  ComplexField c = fft(f);
  c.array() *= dealias_mask(static_cast<std::size_t>(f.size())).cast<std::complex<double>>();
  return ifft(c);
}

ComplexField resample(const ComplexField& f, std::size_t n_new) {
  const auto n = static_cast<std::size_t>(f.size());
  if (n_new == n) return f;
  const ComplexField c = fft(f);
  ComplexField out = ComplexField::Zero(static_cast<Eigen::Index>(n_new));
  const std::size_t keep = std::min(n, n_new) / 2;
  for (std::size_t j = 0; j < keep; ++j) {
    out[static_cast<Eigen::Index>(j)] = c[static_cast<Eigen::Index>(j)];
    if (j > 0) out[static_cast<Eigen::Index>(n_new - j)] = c[static_cast<Eigen::Index>(n - j)];
  }
  const auto nyq_old = static_cast<Eigen::Index>(n / 2);
  if (n_new > n) {
    out[nyq_old] = 0.5 * c[nyq_old];
    out[static_cast<Eigen::Index>(n_new - n / 2)] = 0.5 * c[nyq_old];
  } else {
    const auto m = static_cast<Eigen::Index>(n_new / 2);
    out[m] = c[m] + c[static_cast<Eigen::Index>(n) - m];
  }
  return ifft(out);
}

RealField resample(const RealField& f, std::size_t n_new) {
  return resample(ComplexField(f.cast<std::complex<double>>()), n_new).real();
}

RealField antiderivative(const RealField& f, double length, double* mean) {
  const auto n = static_cast<std::size_t>(f.size());
  ComplexField c = fft(ComplexField(f.cast<std::complex<double>>()));
  if (mean) *mean = c[0].real();
  const RealField q = wavenumbers(n, length);
  c[0] = 0.0;
  c[static_cast<Eigen::Index>(n / 2)] = 0.0;
  const std::complex<double> iunit(0.0, 1.0);
  for (Eigen::Index j = 1; j < c.size(); ++j)
    if (q[j] != 0.0) c[j] /= iunit * q[j];
  return ifft(c).real();
}

}  // namespace spectral

void check_finite(const ComplexField& f, std::string_view what) {
  require(f.allFinite(), ErrorKind::InvalidField, std::string(what) + " has non-finite entries");
}

void check_finite(const RealField& f, std::string_view what) {
  require(f.allFinite(), ErrorKind::InvalidField, std::string(what) + " has non-finite entries");
}

void check_on_grid(const Grid& grid, Eigen::Index n, std::string_view what) {
  require(static_cast<std::size_t>(n) == grid.size(), ErrorKind::InvalidField,
          std::string(what) + " has " + std::to_string(n) + " values on a grid of " +
              std::to_string(grid.size()));
}

ComplexField derivative(const Grid& grid, const ComplexField& f, int order) {
  check_on_grid(grid, f.size(), "field");
  check_finite(f, "field");
  require(order >= 0 && order <= 6, ErrorKind::Precondition, "derivative order must be in [0, 6]");
  return spectral::derivative(f, grid.length(), order);
}

RealField derivative(const Grid& grid, const RealField& f, int order) {
  check_on_grid(grid, f.size(), "field");
  check_finite(f, "field");
  require(order >= 0 && order <= 6, ErrorKind::Precondition, "derivative order must be in [0, 6]");
  return spectral::derivative(f, grid.length(), order);
}

double sobolev_norm(const Grid& grid, const ComplexField& f, int k) {
  require(k >= 0 && k <= 6, ErrorKind::Precondition, "sobolev order must be in [0, 6]");
  check_on_grid(grid, f.size(), "field");
  check_finite(f, "field");
  double total = 0.0;
  for (int j = 0; j <= k; ++j)
    total += spectral::derivative(f, grid.length(), j).squaredNorm() * grid.spacing();
  return std::sqrt(total);
}

double sobolev_norm(const Grid& grid, const RealField& f, int k) {
  return sobolev_norm(grid, ComplexField(f.cast<std::complex<double>>()), k);
}

double lp_norm(const Grid& grid, const ComplexField& f, double p) {
  check_on_grid(grid, f.size(), "field");
  check_finite(f, "field");
  require(p >= 1.0, ErrorKind::Precondition, "L^p norm needs p >= 1");
  if (std::isinf(p)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  if (p == 2.0) return std::sqrt(f.squaredNorm() * grid.spacing());
  const double sum = f.cwiseAbs().array().pow(p).sum();
  return std::pow(sum * grid.spacing(), 1.0 / p);
}

double lp_norm(const Grid& grid, const RealField& f, double p) {
  return lp_norm(grid, ComplexField(f.cast<std::complex<double>>()), p);
}

double inner(const Grid& grid, const RealField& f, const RealField& g) {
  return f.dot(g) * grid.spacing();
}

double inner(const Grid& grid, const ComplexField& f, const ComplexField& g) {
  return (f.real().dot(g.real()) + f.imag().dot(g.imag())) * grid.spacing();
}

PeriodicInterpolant::PeriodicInterpolant(const ComplexField& values, double length, int oversample,
                                         int stencil)
    : length_(length), coarse_n_(static_cast<std::size_t>(values.size())), stencil_(stencil) {
  require(oversample >= 1 && stencil >= 2, ErrorKind::Precondition, "bad interpolant settings");
  fine_ = spectral::resample(values, coarse_n_ * static_cast<std::size_t>(oversample));
  fine_spacing_ = length / static_cast<double>(fine_.size());
  barycentric_.resize(stencil);
  double w = 1.0;
  for (int j = 0; j < stencil; ++j) {
    barycentric_[j] = (j % 2 == 0 ? 1.0 : -1.0) * w;
    w = w * static_cast<double>(stencil - 1 - j) / static_cast<double>(j + 1);
  }
}

std::complex<double> PeriodicInterpolant::operator()(double x) const {
  const auto n = static_cast<long>(fine_.size());
  const double s = x / fine_spacing_;
  double fl = std::floor(s);
  double frac = s - fl;
  if (frac >= 1.0) {
    fl += 1.0;
    frac = 0.0;
  }
  const long base = static_cast<long>(fl) - stencil_ / 2 + 1;
  const auto wrap = [n](long i) { return static_cast<Eigen::Index>(((i % n) + n) % n); };
  if (frac == 0.0) return fine_[wrap(static_cast<long>(fl))];
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (int j = 0; j < stencil_; ++j) {
    const double t = barycentric_[j] / (frac + static_cast<double>(stencil_ / 2 - 1 - j));
    num += t * fine_[wrap(base + j)];
    den += t;
  }
  return num / den;
}

ComplexField PeriodicInterpolant::at_shifted_grid(const RealField& shift) const {
  const double h = length_ / static_cast<double>(coarse_n_);
  ComplexField out(shift.size());
  for (Eigen::Index i = 0; i < shift.size(); ++i)
    out[i] = (*this)(h * static_cast<double>(i) + shift[i]);
  return out;
}

}  // namespace lle
