#include "lle/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lle/error.hpp"
#include "lle/fft.hpp"
#include "lle/version.hpp"

namespace lle {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

Eigen::VectorXd stack(const ComplexField& z) {
  Eigen::VectorXd out(2 * z.size());
  out << z.real(), z.imag();
  return out;
}

ComplexField unstack(const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size() / 2;
  ComplexField z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = {x[i], x[m + i]};
  return z;
}

ComplexField linearized_residual(const LleParams& p, double k, const ComplexField& phi,
                                 const ComplexField& v) {
  const double length = 1.0 / k;
  const ComplexField vxx = spectral::derivative(v, length, 2);
  ComplexField cubic(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    cubic[i] = 2.0 * std::norm(phi[i]) * v[i] + phi[i] * phi[i] * std::conj(v[i]);
  return -kI * p.beta * vxx - (1.0 + kI * p.alpha) * v + kI * spectral::dealias(cubic);
}

// Solves J d = rhs, bordered by the row/column `border` when it is non-empty.
Eigen::VectorXd gauge_solve(const Eigen::MatrixXd& jac, const Eigen::VectorXd& border,
                            const Eigen::VectorXd& rhs, double gauge_rhs) {
  const Eigen::Index n = jac.rows();
  if (border.size() == 0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    require(lu.rcond() > 1e-14, ErrorKind::SingularJacobian,
            "steady Jacobian is singular (rcond " + std::to_string(lu.rcond()) +
                "); the branch may have a fold here");
    return lu.solve(rhs);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = jac;
  a.topRightCorner(n, 1) = border;
  a.bottomLeftCorner(1, n) = border.transpose();
  Eigen::VectorXd b(n + 1);
  b << rhs, gauge_rhs;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  require(lu.rcond() > 1e-14, ErrorKind::SingularJacobian,
          "bordered steady Jacobian is singular (rcond " + std::to_string(lu.rcond()) +
              "); the branch may have a fold here");
  return lu.solve(b).head(n);
}

Eigen::VectorXd translation_border(double k, const ComplexField& values) {
  const ComplexField dx = spectral::derivative(values, 1.0 / k, 1);
  const double scale = dx.norm();
  if (scale <= 1e-10 * std::max(1.0, values.norm())) return {};
  return stack(dx) / scale;
}

}  // namespace

void LleParams::validate() const {
  require(std::isfinite(alpha), ErrorKind::Parameter, "alpha must be finite");
  require(std::isfinite(beta) && beta != 0.0, ErrorKind::Parameter, "beta must be finite and nonzero");
  require(std::isfinite(f_pump) && f_pump > 0.0, ErrorKind::Parameter, "f_pump must be positive");
}

std::vector<std::complex<double>> constant_states(const LleParams& p) {
  p.validate();
  // rho^3 - 2 alpha rho^2 + (1 + alpha^2) rho - F^2 = 0
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 0) = 2.0 * p.alpha;
  companion(0, 1) = -(1.0 + p.alpha * p.alpha);
  companion(0, 2) = p.f_pump * p.f_pump;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::Vector3cd roots = companion.eigenvalues();
  std::vector<double> rhos;
  for (const auto& r : roots)
    if (std::abs(r.imag()) < 1e-9 * std::max(1.0, std::abs(r)) && r.real() > 0) rhos.push_back(r.real());
  std::sort(rhos.begin(), rhos.end());
  std::vector<std::complex<double>> states;
  for (double rho : rhos) {
    // polish the root with a few Newton steps on the cubic
    for (int it = 0; it < 3; ++it) {
      const double f = ((rho - 2 * p.alpha) * rho + 1 + p.alpha * p.alpha) * rho - p.f_pump * p.f_pump;
      const double df = (3 * rho - 4 * p.alpha) * rho + 1 + p.alpha * p.alpha;
      if (df != 0.0) rho -= f / df;
    }
    states.push_back(p.f_pump / (1.0 + kI * p.alpha - kI * rho));
  }
  return states;
}

PeriodicWave::PeriodicWave(LleParams params, double k, ComplexField coeffs, double residual,
                           int iterations)
    : params_(params), k_(k), coeffs_(std::move(coeffs)), residual_(residual), iterations_(iterations) {
  params_.validate();
  require(std::isfinite(k) && k > 0, ErrorKind::Parameter, "wavenumber must be positive");
  require(coeffs_.size() >= 4 && coeffs_.size() % 2 == 0, ErrorKind::InvalidField,
          "wave needs an even number of Fourier coefficients");
  check_finite(coeffs_, "wave coefficients");
}

ComplexField PeriodicWave::period_values(std::size_t points_per_period, int order) const {
  ComplexField c = coeffs_;
  if (order > 0) {
    const RealField q = spectral::wavenumbers(modes(), period());
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= std::pow(kI * q[j], order);
    if (order % 2 == 1) c[c.size() / 2] = 0.0;
  }
  return spectral::resample(ComplexField(ifft(c)), points_per_period);
}

std::size_t PeriodicWave::periods_on(const Grid& grid) const {
  const double periods = grid.length() * k_;
  const auto count = static_cast<std::size_t>(std::llround(periods));
  require(count >= 1 && std::abs(periods - static_cast<double>(count)) < 1e-9 * periods &&
              grid.size() % count == 0,
          ErrorKind::Precondition, "grid does not hold an integer number of wave periods");
  return count;
}

ComplexField PeriodicWave::profile(const Grid& grid, int order) const {
  const std::size_t periods = periods_on(grid);
  const std::size_t per = grid.size() / periods;
  const ComplexField one = period_values(per, order);
  ComplexField out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t p = 0; p < periods; ++p) out.segment(static_cast<Eigen::Index>(p * per), one.size()) = one;
  return out;
}

std::complex<double> PeriodicWave::value(double x, int order) const {
  const RealField q = spectral::wavenumbers(modes(), period());
  std::complex<double> sum = 0.0;
  for (Eigen::Index j = 0; j < coeffs_.size(); ++j) {
    if (j == coeffs_.size() / 2 && order % 2 == 1) continue;
    sum += coeffs_[j] * std::pow(kI * q[j], order) * std::exp(kI * q[j] * x);
  }
  return sum;
}

double PeriodicWave::sup_norm() const {
  return period_values(8 * modes()).cwiseAbs().maxCoeff();
}

bool PeriodicWave::is_constant(double tol) const {
  return coeffs_.tail(coeffs_.size() - 1).cwiseAbs().maxCoeff() <= tol * std::max(1.0, std::abs(coeffs_[0]));
}

ComplexField steady_residual(const LleParams& p, double k, const ComplexField& phi) {
  const ComplexField phixx = spectral::derivative(phi, 1.0 / k, 2);
  ComplexField cubic(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) cubic[i] = std::norm(phi[i]) * phi[i];
  ComplexField r = -kI * p.beta * phixx - (1.0 + kI * p.alpha) * phi + kI * spectral::dealias(cubic);
  r.array() += p.f_pump;
  return r;
}

double steady_residual_norm(const LleParams& p, double k, const ComplexField& values) {
  const double h = 1.0 / (k * static_cast<double>(values.size()));
  return std::sqrt(steady_residual(p, k, values).squaredNorm() * h);
}

Eigen::MatrixXd steady_jacobian(const LleParams& p, double k, const ComplexField& phi) {
  const Eigen::Index m = phi.size();
  Eigen::MatrixXd jac(2 * m, 2 * m);
  ComplexField e = ComplexField::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    e[j] = 1.0;
    jac.col(j) = stack(linearized_residual(p, k, phi, e));
    e[j] = kI;
    jac.col(m + j) = stack(linearized_residual(p, k, phi, e));
    e[j] = 0.0;
  }
  return jac;
}

PeriodicWave solve_steady(const LleParams& params, double k, const ComplexField& guess,
                          const NewtonOptions& options) {
  params.validate();
  require(std::isfinite(k) && k > 0, ErrorKind::Parameter, "wavenumber must be positive");
  check_finite(guess, "initial guess");
  require(guess.size() >= 8 && guess.size() % 2 == 0, ErrorKind::Precondition,
          "initial guess needs an even number of >= 8 samples");
  require(guess.cwiseAbs().maxCoeff() > 0.0, ErrorKind::Precondition, "initial guess must be nonzero");

  const Eigen::VectorXd border = translation_border(k, guess);
  const Eigen::VectorXd reference = stack(guess);
  Eigen::VectorXd x = reference;
  double res = steady_residual_norm(params, k, guess);
  int it = 0;
  while (res >= options.tol) {
    require(it < options.max_iters, ErrorKind::NoConvergence,
            "Newton did not converge in " + std::to_string(options.max_iters) +
                " iterations, last residual " + std::to_string(res));
    const ComplexField phi = unstack(x);
    const Eigen::VectorXd rhs = -stack(steady_residual(params, k, phi));
    const double gauge = border.size() ? -border.dot(x - reference) : 0.0;
    x += gauge_solve(steady_jacobian(params, k, phi), border, rhs, gauge);
    require(x.allFinite(), ErrorKind::NoConvergence, "Newton iterate became non-finite");
    res = steady_residual_norm(params, k, unstack(x));
    ++it;
  }
  return PeriodicWave(params, k, fft(unstack(x)), res, it);
}

PeriodicWave shift_wave(const PeriodicWave& wave, double s) {
  ComplexField c = wave.coeffs();
  const auto m = static_cast<long>(c.size());
  for (long j = 0; j < m; ++j) {
    const long mode = j <= m / 2 ? j : j - m;
    c[j] *= std::exp(kI * 2.0 * std::numbers::pi * static_cast<double>(mode) * s);
  }
  return PeriodicWave(wave.params(), wave.k(), c, wave.residual_norm(), wave.iterations());
}

PeriodicWave center_wave(const PeriodicWave& wave) {
  const ComplexField& c = wave.coeffs();
  const auto plus = c[1];
  const auto minus = c[c.size() - 1];
  if (std::abs(plus) < 1e-12 || std::abs(minus) < 1e-12) return wave;
  const double base = std::arg(minus / plus) / (4.0 * std::numbers::pi);
  PeriodicWave a = shift_wave(wave, base);
  PeriodicWave b = shift_wave(wave, base + 0.5);
  PeriodicWave& best = std::abs(a.value(0.0)) >= std::abs(b.value(0.0)) ? a : b;
  const double res = steady_residual_norm(best.params(), best.k(), best.period_values());
  return PeriodicWave(best.params(), best.k(), best.coeffs(), res, wave.iterations());
}

ComplexField wave_sensitivity(const PeriodicWave& wave) {
  const ComplexField phi = wave.period_values();
  const double k = wave.k();
  const ComplexField phixx = spectral::derivative(phi, 1.0 / k, 2);
  const ComplexField dgdk = -kI * wave.params().beta * (2.0 / k) * phixx;
  const Eigen::VectorXd border = translation_border(k, phi);
  return unstack(gauge_solve(steady_jacobian(wave.params(), k, phi), border, -stack(dgdk), 0.0));
}

ContinuationResult continue_in_k(const PeriodicWave& wave, double k_target, int steps,
                                 const NewtonOptions& options) {
  require(steps >= 1, ErrorKind::Parameter, "continuation needs at least one step");
  require(std::isfinite(k_target) && k_target > 0, ErrorKind::Parameter, "target wavenumber must be positive");
  ContinuationResult out;
  out.waves.push_back(wave);
  if (k_target == wave.k()) return out;
  const double dk = (k_target - wave.k()) / steps;
  for (int s = 1; s <= steps; ++s) {
    const PeriodicWave& prev = out.waves.back();
    const double k_next = s == steps ? k_target : wave.k() + s * dk;
    try {
      const ComplexField predicted = prev.period_values() + (k_next - prev.k()) * wave_sensitivity(prev);
      out.waves.push_back(solve_steady(prev.params(), k_next, predicted, options));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularJacobian && e.kind() != ErrorKind::NoConvergence) throw;
      out.fold_k = k_next;
      out.fold_report = "continuation stopped between k = " + std::to_string(prev.k()) + " and k = " +
                        std::to_string(k_next) + ": " + e.what();
      break;
    }
  }
  return out;
}

WaveFamily::WaveFamily(std::vector<PeriodicWave> waves) {
  require(waves.size() >= 4, ErrorKind::Precondition, "wave family needs at least 4 members");
  std::sort(waves.begin(), waves.end(), [](const auto& a, const auto& b) { return a.k() < b.k(); });
  for (const auto& w : waves) {
    require(w.modes() == waves.front().modes(), ErrorKind::Precondition, "family members differ in resolution");
    ks_.push_back(w.k());
    coeffs_.push_back(w.coeffs());
  }
}

std::complex<double> WaveFamily::value(double kappa, double y) const {
  if (!(kappa >= ks_.front() && kappa <= ks_.back()))
    throw Error(ErrorKind::Extrapolation, "wavenumber " + std::to_string(kappa) + " outside family range [" +
                                              std::to_string(ks_.front()) + ", " + std::to_string(ks_.back()) + "]");
  const auto upper = std::upper_bound(ks_.begin(), ks_.end(), kappa);
  auto i1 = static_cast<long>(upper - ks_.begin()) - 1;
  const long n = static_cast<long>(ks_.size());
  long first = std::clamp(i1 - 1, 0L, n - 4);
  const Eigen::Index m = coeffs_.front().size();
  const std::complex<double> step = std::exp(kI * 2.0 * std::numbers::pi * y);
  std::complex<double> sum = 0.0;
  for (long a = first; a < first + 4; ++a) {
    double w = 1.0;
    for (long b = first; b < first + 4; ++b)
      if (b != a) w *= (kappa - ks_[b]) / (ks_[a] - ks_[b]);
    const ComplexField& c = coeffs_[a];
    std::complex<double> part = c[0], e = 1.0;
    for (Eigen::Index j = 1; j < m / 2; ++j) {
      e *= step;
      part += c[j] * e + c[m - j] * std::conj(e);
    }
    e *= step;
    part += c[m / 2] * e.real();
    sum += w * part;
  }
  return sum;
}

WaveFamily build_family(const PeriodicWave& wave, double k_lo, double k_hi, int n_waves) {
  require(k_lo < wave.k() && wave.k() < k_hi && n_waves >= 5, ErrorKind::Precondition,
          "family range must bracket the base wavenumber");
  const double span = k_hi - k_lo;
  const int down = std::max(2, static_cast<int>(std::lround((n_waves - 1) * (wave.k() - k_lo) / span)));
  const int up = std::max(2, n_waves - 1 - down);
  auto lower = continue_in_k(wave, k_lo, down);
  auto higher = continue_in_k(wave, k_hi, up);
  require(!lower.fold_k && !higher.fold_k, ErrorKind::Extrapolation,
          "wave family hit a fold: " + lower.fold_report + higher.fold_report);
  std::vector<PeriodicWave> all = lower.waves;
  all.insert(all.end(), higher.waves.begin() + 1, higher.waves.end());
  return WaveFamily(std::move(all));
}

void to_json(nlohmann::json& j, const LleParams& p) {
  j = {{"alpha", p.alpha}, {"beta", p.beta}, {"f_pump", p.f_pump}};
}

void from_json(const nlohmann::json& j, LleParams& p) {
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.f_pump = j.at("f_pump").get<double>();
}

nlohmann::json wave_to_json(const PeriodicWave& wave) {
  std::vector<double> interleaved;
  for (const auto& c : wave.coeffs()) {
    interleaved.push_back(c.real());
    interleaved.push_back(c.imag());
  }
  return {{"params", wave.params()},
          {"k", wave.k()},
          {"modes", wave.modes()},
          {"coefficients", interleaved},
          {"residual", wave.residual_norm()},
          {"iterations", wave.iterations()},
          {"tool_version", kToolVersion}};
}

PeriodicWave wave_from_json(const nlohmann::json& j) {
  try {
    const auto values = j.at("coefficients").get<std::vector<double>>();
    require(values.size() % 2 == 0, ErrorKind::Configuration, "coefficient list must interleave re/im pairs");
    ComplexField c(static_cast<Eigen::Index>(values.size() / 2));
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = {values[2 * i], values[2 * i + 1]};
    return PeriodicWave(j.at("params").get<LleParams>(), j.at("k").get<double>(), c,
                        j.value("residual", 0.0), j.value("iterations", 0));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("malformed wave document: ") + e.what());
  }
}

}  // namespace lle
