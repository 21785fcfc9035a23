#include <doctest.h>

#include <filesystem>

#include "lle/bloch.hpp"
#include "lle/error.hpp"
#include "lle/evolution.hpp"
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

Grid periods_grid(int periods, int per = 64) {
  const PeriodicWave& w = test::stable_wave();
  return Grid(static_cast<std::size_t>(periods * per), periods * w.period());
}

ComplexField bump(const Grid& g, double amplitude, double width) {
  return test::sample(g, [&](double x) {
    const double s = (x - 0.5 * g.length()) / width;
    return amplitude * std::complex<double>(1.0, 0.5) * std::exp(-s * s);
  });
}

ComplexField evolve_to(const Grid& g, const ComplexField& psi0, const LleParams& p, double t, double dt) {
  const auto steps = static_cast<int>(std::lround(t / dt));
  return evolve(FieldState{g, 0.0, psi0}, p, EvolveOptions{t, dt, steps, false}).states.back();
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("steady wave is a fixed point of one step") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(4);
  const ComplexField phi = w.profile(g);
  const double dt = 0.05;
  const FieldState next = step(FieldState{g, 0.0, phi}, dt, w.params());
  CHECK(next.time == doctest::Approx(dt));
  CHECK(lp_norm(g, ComplexField(next.psi - phi), 2) < 1e-10 * dt);
}

TEST_CASE("unforced small data decays like exp(-t)") {
  const LleParams p{0.3, -1.0, 1e-12};
  const Grid g(128, 20.0);
  const ComplexField psi0 = 1e-3 * test::random_field(128, 8, 4);
  const double t = 5.0;
  const ComplexField end = evolve_to(g, psi0, p, t, 0.05);
  const double ratio = lp_norm(g, end, 2) / (std::exp(-t) * lp_norm(g, psi0, 2));
  CHECK(std::abs(ratio - 1.0) < 1e-5);
}

TEST_CASE("fourth-order convergence in dt") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(2);
  const ComplexField psi0 = w.profile(g) + 0.2 * test::random_field(128, 6, 8);
  const double t = 2.0;
  const ComplexField ref = evolve_to(g, psi0, w.params(), t, 0.05 / 16);
  const double e1 = lp_norm(g, ComplexField(evolve_to(g, psi0, w.params(), t, 0.05) - ref), 2);
  const double e2 = lp_norm(g, ComplexField(evolve_to(g, psi0, w.params(), t, 0.025) - ref), 2);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("steady wave is preserved over t = 100") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(4);
  const ComplexField phi = w.profile(g);
  const Trajectory tr = evolve(FieldState{g, 0.0, phi}, w.params(), EvolveOptions{100.0, 0.05, 100, false});
  CHECK(tr.size() == 21);
  double worst = 0;
  for (const auto& s : tr.states) worst = std::max(worst, test::max_abs(s - phi));
  CHECK(worst < 1e-8);
}

TEST_CASE("linearized flow of a Bloch mode grows at Re lambda") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(8);
  const double xi = 2 * kPi * w.k() * 2 / 8;
  const BlochMode mode = bloch_mode(LinearizedOperator(w), xi, 64, g, 0);
  const ComplexField phi = w.profile(g);
  const double t = 5.0, dt = 0.01;
  double n0 = 0, n1 = 0;
  for (const std::complex<double> rot : {std::complex<double>(1, 0), std::complex<double>(0, -1)}) {
    ComplexField v(phi.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {(rot * mode.field_r[i]).real(), (rot * mode.field_i[i]).real()};
    const Trajectory tr = evolve(FieldState{g, 0.0, ComplexField(phi + v)}, w.params(),
                                 EvolveOptions{t, dt, 500, true}, w);
    n0 += std::pow(lp_norm(g, v, 2), 2);
    n1 += std::pow(lp_norm(g, ComplexField(tr.states.back() - phi), 2), 2);
  }
  REQUIRE(mode.lambda.real() < 0);
  CHECK(std::sqrt(n1 / n0) == doctest::Approx(std::exp(t * mode.lambda.real())).epsilon(0.01));
}

TEST_CASE("nonlinear and linearized flows separate at second order") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(4);
  const ComplexField phi = w.profile(g);
  auto gap = [&](double eps) {
    const ComplexField psi0 = phi + bump(g, eps, 1.0);
    const EvolveOptions o{5.0, 0.05, 100, false};
    EvolveOptions lin = o;
    lin.linearized = true;
    const Trajectory a = evolve(FieldState{g, 0.0, psi0}, w.params(), o);
    const Trajectory b = evolve(FieldState{g, 0.0, psi0}, w.params(), lin, w);
    return lp_norm(g, ComplexField(a.states.back() - b.states.back()), 2);
  };
  CHECK(gap(1e-2) / gap(5e-3) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("perturbation examples") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(16);
  const ComplexField phi = w.profile(g);

  PerturbationSpec none;
  none.amplitude = 0.0;
  CHECK(make_perturbation(none, w, g).state.psi == phi);

  PerturbationSpec step;
  step.kind = PerturbationKind::NonlocalizedPhase;
  step.width = 5.0;
  const double c = 0.01;
  step.h0_limits = {-c, c};
  const Perturbation np = make_perturbation(step, w, g);
  REQUIRE(np.h0);
  const double phix_sup = w.period_values(512, 1).cwiseAbs().maxCoeff();
  const double dev = test::max_abs(np.state.psi - phi);
  CHECK(dev > 0);
  CHECK(dev <= phix_sup * c * 1.05);
  CHECK(np.applied_shift == 0.0);

  step.h0_limits = {0.1, 0.3};
  const Perturbation shifted = make_perturbation(step, w, g);
  CHECK(shifted.applied_shift == doctest::Approx(0.2));
  CHECK(shifted.h0->maxCoeff() == doctest::Approx(0.1).epsilon(2e-3));
  CHECK(shifted.h0->minCoeff() == doctest::Approx(-0.1).epsilon(2e-3));

  PerturbationSpec loc;
  loc.amplitude = 1e-3;
  loc.width = 1.0;
  auto l1 = [&](int periods) {
    const Grid gg = periods_grid(periods);
    const ComplexField v = make_perturbation(loc, w, gg).state.psi - w.profile(gg);
    return lp_norm(gg, v, 1);
  };
  CHECK(l1(16) == doctest::Approx(l1(32)).epsilon(1e-10));

  loc.amplitude = 1.0;
  CHECK(kind_of([&] { make_perturbation(loc, w, g); }) == ErrorKind::Precondition);
  step.h0_limits = {-5.0, 5.0};
  CHECK(kind_of([&] { make_perturbation(step, w, g); }) == ErrorKind::Precondition);

  PerturbationSpec noisy;
  noisy.kind = PerturbationKind::RandomLocalized;
  noisy.amplitude = 1e-3;
  const ComplexField a = make_perturbation(noisy, w, g).state.psi;
  CHECK(test::max_abs(a - phi) == doctest::Approx(1e-3));
  CHECK(make_perturbation(noisy, w, g).state.psi == a);
}

TEST_CASE("trajectory save and load round trip") {
  const PeriodicWave& w = test::stable_wave();
  const Grid g = periods_grid(2);
  const Trajectory tr = evolve(FieldState{g, 0.0, ComplexField(w.profile(g) + bump(g, 1e-3, 1.0))}, w.params(),
                               EvolveOptions{1.0, 0.05, 5, false}, w);
  const auto dir = std::filesystem::temp_directory_path() / "lle_unit_traj";
  std::filesystem::remove_all(dir);
  save_trajectory(tr, dir.string());
  CHECK(std::filesystem::exists(dir / "metadata.json"));
  CHECK(std::filesystem::exists(dir / "index.csv"));
  const Trajectory back = load_trajectory(dir.string());
  REQUIRE(back.size() == tr.size());
  CHECK(back.grid == tr.grid);
  CHECK(back.dt == tr.dt);
  REQUIRE(back.wave);
  CHECK(back.wave->coeffs() == w.coeffs());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(back.times[i] == tr.times[i]);
    CHECK(back.states[i] == tr.states[i]);
  }
  std::filesystem::remove_all(dir);
  CHECK(kind_of([&] { load_trajectory(dir.string()); }) == ErrorKind::MissingArtifact);
}

TEST_CASE("grid refinement self-convergence") {
  const PeriodicWave& w = test::stable_wave();
  auto final_norm = [&](int per) {
    const Grid g = periods_grid(4, per);
    const ComplexField phi = w.profile(g);
    return lp_norm(g, ComplexField(evolve_to(g, ComplexField(phi + bump(g, 1e-3, 1.0)), w.params(), 10.0, 0.05) - phi), 2);
  };
  CHECK(std::abs(final_norm(64) - final_norm(128)) < 1e-6);
}

TEST_CASE("blow-up and invalid input") {
  const LleParams p{0.5, -1.0, 1.35};
  const Grid g(64, 10.0);
  try {
    evolve(FieldState{g, 0.0, ComplexField(ComplexField::Constant(64, 1e3))}, p, EvolveOptions{64.0, 0.5, 1, false});
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.kind() == ErrorKind::BlowUp);
    CHECK(e.partial().size() >= 1);
    CHECK(e.partial().states.front().allFinite());
  }
  ComplexField bad = ComplexField::Ones(64);
  bad[5] = std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { evolve(FieldState{g, 0.0, bad}, p, EvolveOptions{}); }) == ErrorKind::InvalidField);
  const ComplexField ok = ComplexField::Ones(64);
  CHECK(kind_of([&] { evolve(FieldState{g, 0.0, ok}, p, EvolveOptions{1.0, 0.3, 1, false}); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { evolve(FieldState{g, 0.0, ok}, p, EvolveOptions{1.0, 0.1, 1, true}); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { step(FieldState{g, 0.0, ok}, -0.1, p); }) == ErrorKind::Parameter);
  CHECK(perturbation_kind_from_string(to_string(PerturbationKind::NonlocalizedPhase)) == PerturbationKind::NonlocalizedPhase);
  CHECK(kind_of([] { perturbation_kind_from_string("wobble"); }) == ErrorKind::Configuration);
}

}
