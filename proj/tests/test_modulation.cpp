#include <doctest.h>

#include "lle/error.hpp"
#include "lle/modulation.hpp"
#include "support.hpp"

using namespace lle;
using test::kPi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no lle::Error thrown");
  return ErrorKind::Backend;
}

RealField real_sample(const Grid& g, auto&& f) {
  RealField v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(g.x(i));
  return v;
}

/// 8-point Lagrange interpolation of fine-grid samples of a periodic function.
double lagrange8(auto&& fn, double length, std::size_t fine_n, double x) {
  const double h = length / static_cast<double>(fine_n);
  const auto base = static_cast<long>(std::floor(x / h)) - 3;
  double sum = 0;
  for (long a = base; a < base + 8; ++a) {
    double w = 1;
    for (long b = base; b < base + 8; ++b)
      if (b != a) w *= (x - b * h) / ((a - b) * h);
    sum += w * fn(a * h);
  }
  return sum;
}

Grid wave_grid(int periods) {
  const PeriodicWave& w = test::stable_wave();
  return Grid(static_cast<std::size_t>(64 * periods), periods * w.period());
}

ComplexField shifted_profile(const Grid& g, const RealField& shift) {
  return PeriodicInterpolant(test::stable_wave().profile(g), g.length()).at_shifted_grid(shift);
}

}  // namespace

TEST_SUITE("modulation") {

TEST_CASE("compose_shift examples") {
  const double L = 6.0;
  const Grid g(64, L);
  const ComplexField f = test::random_field(64, 10, 1);
  CHECK(compose_shift(g, f, RealField::Zero(64), ShiftDirection::Forward) == f);
  const auto e = test::sample(g, [&](double x) { return std::exp(std::complex<double>(0, 2 * kPi * x / L)); });
  const double c = 0.37;
  const auto want = test::sample(g, [&](double x) { return std::exp(std::complex<double>(0, 2 * kPi * (x + c) / L)); });
  CHECK(test::max_abs(compose_shift(g, e, RealField::Constant(64, c), ShiftDirection::Forward) - want) < 1e-10);
}

TEST_CASE("compose_shift agrees with 8-point Lagrange interpolation on a 4x finer grid") {
  const double L = 2 * kPi;
  const Grid g(64, L);
  const auto fn = [&](double x) { return std::exp(std::sin(2 * kPi * x / L)); };
  const RealField f = real_sample(g, fn);
  const RealField gamma = real_sample(g, [&](double x) { return 0.4 * std::cos(2 * kPi * x / L) + 0.1; });
  const RealField got = compose_shift(g, f, gamma, ShiftDirection::Forward);
  double err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    err = std::max(err, std::abs(got[j] - lagrange8(fn, L, 256, g.x(i) + gamma[j])));
  }
  CHECK(err < 1e-7);
}

TEST_CASE("invert_coordinate examples") {
  const double L = 10.0;
  const Grid g(128, L);
  CHECK(test::max_abs(invert_coordinate(g, RealField::Zero(128))) == 0.0);
  CHECK(test::max_abs(invert_coordinate(g, RealField::Constant(128, 0.7)).array() - 0.7) < 1e-12);

  const double a = 0.3 * L / (2 * kPi);
  const auto gam = [&](double y) { return a * std::sin(2 * kPi * y / L); };
  const RealField gamma = real_sample(g, gam);
  const RealField tilde = invert_coordinate(g, gamma);
  CHECK(inversion_defect(g, gamma, tilde) < 1e-10);
  double err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    double lo = x - a - 1, hi = x + a + 1;  // y - gamma(y) is increasing
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid - gam(mid) < x ? lo : hi) = mid;
    }
    const double y = 0.5 * (lo + hi);
    err = std::max(err, std::abs(tilde[static_cast<Eigen::Index>(i)] - (y - x)));
    CHECK(std::abs((x + tilde[static_cast<Eigen::Index>(i)]) - gam(x + tilde[static_cast<Eigen::Index>(i)]) - x) < 1e-9);
  }
  CHECK(err < 1e-9);

  const RealField steep = real_sample(g, [&](double y) { return 1.2 * L / (2 * kPi) * std::sin(2 * kPi * y / L); });
  CHECK(kind_of([&] { invert_coordinate(g, steep); }) == ErrorKind::NonInvertible);
}

TEST_CASE("property: backward shift then inverse-coordinate forward shift is the identity") {
  const double L = 12.0;
  const Grid g(256, L);
  for (unsigned seed = 0; seed < 8; ++seed) {
    const ComplexField f = spectral::dealias(test::random_field(256, 12, 300 + seed));
    RealField gamma = test::random_field(256, 5, 400 + seed).real();
    gamma *= (0.05 + 0.45 * seed / 7.0) / test::max_abs(derivative(g, gamma, 1));
    const RealField tilde = invert_coordinate(g, gamma);
    const ComplexField there = compose_shift(g, f, gamma, ShiftDirection::Backward);
    const ComplexField back = compose_shift(g, there, tilde, ShiftDirection::Forward);
    CHECK(test::max_abs(back - f) < 1e-8);
  }
}

TEST_CASE("phase of the wave itself vanishes for both methods") {
  const Grid g = wave_grid(16);
  const PeriodicWave& w = test::stable_wave();
  for (auto m : {PhaseMethod::BlochProjection, PhaseMethod::WindowedXcorr}) {
    PhaseOptions o;
    o.method = m;
    const PhaseField ph = extract_phase(FieldState{g, 0.0, w.profile(g)}, w, o);
    CHECK(test::max_abs(ph.gamma) < 1e-8);
  }
}

TEST_CASE("phase of a translated wave recovers the shift") {
  const Grid g = wave_grid(16);
  const PeriodicWave& w = test::stable_wave();
  auto error = [&](PhaseMethod m, double c) {
    PhaseOptions o;
    o.method = m;
    const ComplexField psi = shifted_profile(g, RealField::Constant(static_cast<Eigen::Index>(g.size()), -c));
    return test::max_abs(extract_phase(FieldState{g, 0.0, psi}, w, o).gamma.array() - c);
  };
  CHECK(error(PhaseMethod::WindowedXcorr, 0.05) < 1e-6);
  const double e1 = error(PhaseMethod::BlochProjection, 0.05);
  const double e2 = error(PhaseMethod::BlochProjection, 0.025);
  CHECK(e1 <= 10 * 0.05 * 0.05);
  CHECK(e2 <= 10 * 0.025 * 0.025);
}

TEST_CASE("phase of a slowly modulated wave tracks the modulation") {
  const Grid g = wave_grid(32);
  const PeriodicWave& w = test::stable_wave();
  const RealField h0 = smoothed_double_step(g, 0.05, 10.0);
  const ComplexField psi = shifted_profile(g, RealField(-h0));
  PhaseOptions bp, xc;
  xc.method = PhaseMethod::WindowedXcorr;
  const PhaseField a = extract_phase(FieldState{g, 0.0, psi}, w, bp);
  const PhaseField b = extract_phase(FieldState{g, 0.0, psi}, w, xc);
  const double hx = test::max_abs(derivative(g, h0, 1));
  const double c = test::max_abs(a.gamma - h0) / hx;
  MESSAGE("sup |gamma - h0| / sup |h0_x| = " << c);
  CHECK(c < 10.0);
  CHECK(lp_norm(g, RealField(a.gamma - b.gamma), 2) <= 0.05 * lp_norm(g, b.gamma, 2));
  CHECK((a.gamma_x - derivative(g, a.gamma, 1)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(a.sup_gx < 1.0);
}

TEST_CASE("phase extraction errors") {
  const Grid g = wave_grid(16);
  const PeriodicWave& w = test::stable_wave();
  const ComplexField far = w.profile(g) * 3.0;
  CHECK(kind_of([&] { extract_phase(FieldState{g, 0.0, far}, w); }) == ErrorKind::PhaseUndefined);
  CHECK(kind_of([&] { extract_phase(FieldState{Grid(1024, 81.0), 0.0, ComplexField::Ones(1024)}, w); }) ==
        ErrorKind::Precondition);
  CHECK(phase_method_from_string(to_string(PhaseMethod::WindowedXcorr)) == PhaseMethod::WindowedXcorr);
  CHECK(kind_of([] { phase_method_from_string("guess"); }) == ErrorKind::Configuration);
}

TEST_CASE("modulated pair examples") {
  const Grid g = wave_grid(4);
  const ComplexField phi = test::stable_wave().profile(g);
  const ComplexField psi = phi + 1e-2 * test::random_field(g.size(), 8, 12);
  const ModulatedPair zero = modulated_pair(g, psi, phi, make_phase(g, RealField::Zero(static_cast<Eigen::Index>(g.size()))));
  CHECK(zero.v_inverse == psi - phi);
  CHECK(zero.v_forward == psi - phi);

  const double c = 0.3;
  const RealField cs = RealField::Constant(static_cast<Eigen::Index>(g.size()), c);
  const ComplexField moved = shifted_profile(g, RealField(-cs));
  const ModulatedPair exact = modulated_pair(g, moved, phi, make_phase(g, cs));
  CHECK(test::max_abs(exact.v_inverse) < 1e-9);
  CHECK(test::max_abs(exact.v_forward) < 1e-9);

  const RealField shape = real_sample(g, [&](double x) { return std::sin(2 * kPi * x / g.length()); });
  const ComplexField phixx = derivative(g, phi, 2);
  auto defect = [&](double a) {
    const RealField gamma = a * shape;
    const ModulatedPair m = modulated_pair(g, phi, phi, make_phase(g, gamma));
    const ComplexField taylor = (phixx.array() * gamma.array().square().cast<std::complex<double>>()).matrix();
    return lp_norm(g, ComplexField(m.v_inverse - m.v_forward - taylor), 2);
  };
  CHECK(defect(0.02) / defect(0.01) > 7.0);
  RealField steep = shape * (2.0 * g.length() / (2 * kPi));
  CHECK(kind_of([&] { modulated_pair(g, phi, phi, make_phase(g, steep)); }) == ErrorKind::SteepPhase);
}

TEST_CASE("equivalence with gamma = 0 is tight") {
  const Grid g(256, 16.0);
  const EquivalenceSample s = make_equivalence_sample(1, 2, CorpusOptions{}, 256);
  const RealField zero = RealField::Zero(256);
  for (double p : {2.0, 4.0, test::kInf}) {
    const LpEquivalenceReport r = check_equivalence_lp(g, s.psi, s.phi, zero, p);
    const double scale = std::max(1.0, r.base);
    CHECK(std::abs(r.slack_upper_inverse) < 1e-10 * scale);
    CHECK(std::abs(r.slack_upper_shifted) < 1e-10 * scale);
    CHECK(std::abs(r.slack_lower_inverse) < 1e-10 * scale);
    CHECK(std::abs(r.slack_lower_shifted) < 1e-10 * scale);
    CHECK(!r.violation);
  }
  for (int k = 0; k <= 3; ++k) CHECK(check_equivalence_hk(g, s.psi, s.phi, zero, k).constant == 1.0);
}

TEST_CASE("property: randomized equivalence corpus has no violations") {
  CorpusOptions o;
  const CorpusResult r = run_equivalence_corpus(7, 60, {2.0, 4.0, test::kInf}, o, 256, 1);
  CHECK(r.violations == 0);
  CHECK(r.lp.size() == 180);
  CHECK(r.max_roundtrip < 1e-10);
  for (const auto& rep : r.lp) CHECK(rep.sup_gx <= o.max_gx);
}

TEST_CASE("p = infinity drops the Jacobian prefactors") {
  const Grid g(256, 16.0);
  const EquivalenceSample s = make_equivalence_sample(3, 5, CorpusOptions{}, 256);
  const LpEquivalenceReport r = check_equivalence_lp(g, s.psi, s.phi, s.gamma, test::kInf);
  CHECK(r.sup_gx > 0);
  CHECK(r.slack_upper_inverse == doctest::Approx(r.base - r.inverse_lhs));
  CHECK(r.slack_lower_inverse == doctest::Approx(r.inverse_lhs - r.base));
  CHECK(r.slack_lower_inverse_printed == r.slack_lower_inverse);
  CHECK(r.lp_gx == doctest::Approx(r.sup_gx));
}

TEST_CASE("H^0 report is consistent with the L^2 report") {
  const Grid g(256, 16.0);
  for (std::uint64_t id = 0; id < 5; ++id) {
    const EquivalenceSample s = make_equivalence_sample(11, id, CorpusOptions{}, 256);
    const LpEquivalenceReport lp = check_equivalence_lp(g, s.psi, s.phi, s.gamma, 2.0);
    const HkEquivalenceReport hk = check_equivalence_hk(g, s.psi, s.phi, s.gamma, 0);
    CHECK(hk.base == doctest::Approx(lp.base).epsilon(1e-9));
    CHECK(hk.shifted_lhs == doctest::Approx(lp.shifted_lhs).epsilon(1e-9));
    CHECK(hk.gamma_term >= lp.lp_gx);
  }
}

TEST_CASE("H^k constant is stable under grid doubling") {
  CorpusOptions o;
  o.hk_gamma_bound = 0.1;
  o.hk_order = 2;
  const CorpusResult coarse = run_equivalence_corpus(5, 30, {2.0}, o, 256, 1);
  const CorpusResult fine = run_equivalence_corpus(5, 30, {2.0}, o, 512, 1);
  CHECK(std::isfinite(coarse.max_hk_constant));
  CHECK(fine.max_hk_constant <= 2 * coarse.max_hk_constant);
  CHECK(coarse.max_hk_constant <= 2 * fine.max_hk_constant);
  CHECK(kind_of([&] { check_equivalence_hk(Grid(256, 16.0), ComplexField::Ones(256), ComplexField::Ones(256), RealField::Zero(256), 5); }) ==
        ErrorKind::Precondition);
}

}
