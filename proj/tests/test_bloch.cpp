#include <doctest.h>

#include <algorithm>

#include "lle/bloch.hpp"
#include "lle/error.hpp"
#include "lle/evolution.hpp"
#include "support.hpp"

using namespace lle;
using test::kPi;

namespace {

const BlochSpectrum& stable_spectrum() {
  static const BlochSpectrum s = assess_stability(LinearizedOperator(test::stable_wave()), 64, 64);
  return s;
}

PeriodicWave constant_wave(std::complex<double> c, double k) {
  ComplexField coeffs = ComplexField::Zero(64);
  coeffs[0] = c;
  return PeriodicWave(LleParams{0.5, -1.0, 1.35}, k, coeffs);
}

/// Eigenvalues of -I + J L for constant phi at total wavenumber mu.
std::pair<std::complex<double>, std::complex<double>> constant_dispersion(std::complex<double> phi, double mu) {
  const LleParams p{0.5, -1.0, 1.35};
  const double a = phi.real(), b = phi.imag();
  const double s = p.beta * mu * mu - p.alpha;
  const double l11 = s + 3 * a * a + b * b, l22 = s + a * a + 3 * b * b, l12 = 2 * a * b;
  const std::complex<double> root = std::sqrt(std::complex<double>(l12 * l12 - l11 * l22));
  return {-1.0 + root, -1.0 - root};
}

/// Largest distance from an entry of `a` to its nearest entry in `b`.
double set_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  double worst = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, (b.array() - a[i]).abs().minCoeff());
  return worst;
}

/// Least-stable first: decreasing real part (rounded to 1e-6), ties by increasing modulus.
/// Most eigenvalues sit on Re = -1, so the modulus decides among the resolved low modes.
std::vector<std::complex<double>> least_stable(const Eigen::VectorXcd& v, std::size_t count) {
  std::vector<std::complex<double>> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    const double rx = std::round(x.real() * 1e6), ry = std::round(y.real() * 1e6);
    return rx != ry ? rx > ry : std::abs(x) < std::abs(y);
  });
  out.resize(std::min(count, out.size()));
  return out;
}

}  // namespace

TEST_SUITE("bloch") {

TEST_CASE("constant state eigenvalues match the closed-form dispersion relation") {
  const auto c = constant_states(LleParams{0.5, -1.0, 1.35}).back();
  const double k = 0.2;
  const LinearizedOperator op(constant_wave(c, k));
  for (double xi : {0.0, 0.17, -0.4, k * kPi}) {
    const Eigen::MatrixXcd b = bloch_matrix(op, xi, 32);
    std::vector<std::complex<double>> want;
    for (int m = -16; m < 16; ++m) {
      const auto [l1, l2] = constant_dispersion(c, xi + 2 * kPi * k * m);
      want.push_back(l1);
      want.push_back(l2);
    }
    const Eigen::VectorXcd wv = Eigen::Map<Eigen::VectorXcd>(want.data(), static_cast<Eigen::Index>(want.size()));
    const Eigen::VectorXcd got = b.eigenvalues();
    CHECK(set_distance(got, wv) < 1e-10);
    CHECK(set_distance(wv, got) < 1e-10);
  }
}

TEST_CASE("Turing-unstable constant state gets an unstable verdict") {
  const auto c = constant_states(LleParams{0.5, -1.0, 1.35}).back();
  double top = -1;
  for (double mu = 0; mu < 4; mu += 1e-3) top = std::max(top, constant_dispersion(c, mu).first.real());
  REQUIRE(top > 0.1);
  const BlochSpectrum s = assess_stability(LinearizedOperator(constant_wave(c, 0.2)), 64, 32);
  CHECK(s.verdict == Verdict::Unstable);
  CHECK(s.max_re_nonzero == doctest::Approx(top).epsilon(0.05));
}

TEST_CASE("xi = 0 Bloch matrix annihilates phi_x") {
  const PeriodicWave& w = test::stable_wave();
  const LinearizedOperator op(w);
  const ComplexField phix = w.period_values(64, 1);
  const Eigen::VectorXcd cr = bloch_coefficients(ComplexField(phix.real().cast<std::complex<double>>()), 64);
  const Eigen::VectorXcd ci = bloch_coefficients(ComplexField(phix.imag().cast<std::complex<double>>()), 64);
  Eigen::VectorXcd v(128);
  v << cr, ci;
  CHECK((bloch_matrix(op, 0.0, 64) * v).norm() < 1e-8);
}

TEST_CASE("doubling the truncation leaves the least-stable eigenvalues unchanged") {
  const LinearizedOperator op(test::stable_wave());
  for (double xi : {0.0, 0.21}) {
    const auto a = least_stable(bloch_matrix(op, xi, 64).eigenvalues(), 10);
    const Eigen::VectorXcd b = bloch_matrix(op, xi, 128).eigenvalues();
    for (auto z : a) CHECK((b.array() - z).abs().minCoeff() < 1e-8);
  }
}

TEST_CASE("property: spectra at xi and -xi are complex conjugates") {
  const LinearizedOperator op(test::stable_wave());
  for (double xi : {0.05, 0.3, 0.55}) {
    // the truncations at xi and -xi differ in their edge mode, so compare the resolved part
    const auto plus = least_stable(bloch_matrix(op, xi, 64).eigenvalues(), 40);
    const Eigen::VectorXcd minus = bloch_matrix(op, -xi, 64).eigenvalues().conjugate();
    for (auto z : plus) CHECK((minus.array() - z).abs().minCoeff() < 1e-8);
  }
}

TEST_CASE("shipped wave is diffusively stable") {
  const BlochSpectrum& s = stable_spectrum();
  CHECK(s.verdict == Verdict::Stable);
  CHECK(s.curvature > 0);
  CHECK(s.lambda0 < 1e-8);
  CHECK(s.gap > 1e-3);
  CHECK(s.max_re_nonzero < 0);
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    if (std::abs(s.xi[i]) > s.xi_fit || s.xi[i] == 0.0) continue;
    const double xi = s.xi[i];
    CHECK(std::abs(s.critical(i).real() + s.curvature * xi * xi) <= s.cubic_constant * std::pow(std::abs(xi), 3) * (1 + 1e-9));
  }
}

TEST_CASE("high-frequency rate is positive, at most one and truncation independent") {
  const BlochSpectrum& s = stable_spectrum();
  const double cut = 0.2 * 2 * kPi * s.k;
  const double theta = high_freq_rate(s, cut);
  CHECK(theta > 0);
  CHECK(theta <= 1.0);
  // the maximizing eigenvalue recomputed with doubled truncation
  std::size_t at = 0;
  Eigen::Index which = 0;
  for (std::size_t i = 0; i < s.xi.size(); ++i)
    for (Eigen::Index j = 0; j < s.eigenvalues[i].size(); ++j) {
      if (std::abs(s.xi[i]) < cut && j == s.critical_index[i]) continue;
      if (s.eigenvalues[i][j].real() == -theta) at = i, which = j;
    }
  const Eigen::VectorXcd fine = bloch_matrix(LinearizedOperator(test::stable_wave()), s.xi[at], 128).eigenvalues();
  CHECK((fine.array() - s.eigenvalues[at][which]).abs().minCoeff() < 1e-6);
  BlochSpectrum bad = s;
  bad.verdict = Verdict::Unstable;
  CHECK_THROWS_AS(high_freq_rate(bad, cut), Error);
}

TEST_CASE("property: L is symmetric") {
  const PeriodicWave& w = test::stable_wave();
  const LinearizedOperator op(w);
  const Grid g(256, 4 * w.period());
  for (unsigned seed = 0; seed < 5; ++seed) {
    const ComplexField u = test::random_field(256, 40, 10 + seed);
    const ComplexField v = test::random_field(256, 40, 50 + seed);
    const auto [lur, lui] = op.apply_l(g, u.real(), u.imag());
    const auto [lvr, lvi] = op.apply_l(g, v.real(), v.imag());
    const double a = inner(g, lur, RealField(v.real())) + inner(g, lui, RealField(v.imag()));
    const double b = inner(g, RealField(u.real()), lvr) + inner(g, RealField(u.imag()), lvi);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("property: random linearized flow decays at the Bloch spectral abscissa") {
  const PeriodicWave& w = test::stable_wave();
  const int periods = 8;
  const Grid g(512, periods * w.period());
  // remove the xi = 0 class (Fourier modes that are multiples of the period count)
  ComplexField c = fft(test::random_field(512, 60, 77));
  for (Eigen::Index j = 0; j < c.size(); j += periods) c[j] = 0.0;
  const ComplexField v0 = 1e-3 * ifft(c);
  const ComplexField phi = w.profile(g);
  const Trajectory tr = evolve(FieldState{g, 0.0, phi + v0}, w.params(), EvolveOptions{40.0, 0.05, 100, true}, w);
  auto norm_at = [&](double t) {
    const auto i = static_cast<std::size_t>(std::lround(t / 5.0));
    return lp_norm(g, ComplexField(tr.states[i] - phi), 2);
  };
  const double rate = std::log(norm_at(40) / norm_at(25)) / 15.0;
  const LinearizedOperator op(w);
  double top = -test::kInf;
  for (int j = -3; j <= 4; ++j) {
    if (j == 0) continue;
    top = std::max(top, bloch_matrix(op, 2 * kPi * w.k() * j / periods, 64).eigenvalues().real().maxCoeff());
  }
  REQUIRE(top < 0);
  CHECK(std::abs(rate - top) <= 0.1 * std::abs(top));
}

TEST_CASE("precondition errors") {
  const LinearizedOperator op(test::stable_wave());
  CHECK_THROWS_AS(bloch_matrix(op, 0.0, 16), Error);
  CHECK_THROWS_AS(bloch_matrix(op, 1.0, 64), Error);
  CHECK_THROWS_AS(assess_stability(op, 32, 64), Error);
}

}
