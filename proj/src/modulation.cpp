#include "lle/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

#include "lle/bloch.hpp"
#include "lle/error.hpp"
#include "lle/fft.hpp"
#include "lle/parallel.hpp"

namespace lle {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField as_complex(const RealField& f) { return f.cast<std::complex<double>>(); }

double sup(const RealField& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

// Real band-limited field evaluated off-grid.
class RealInterpolant {
 public:
  RealInterpolant(const RealField& f, double length) : inner_(as_complex(f), length) {}
  double operator()(double x) const { return inner_(x).real(); }

 private:
  PeriodicInterpolant inner_;
};

// Maximizes a smooth periodic function given its samples on a fine grid: the best local
// maxima are refined by golden-section search on the continuous function.
template <class F>
double refined_sup(const F& f, double length, std::size_t samples) {
  const double h = length / static_cast<double>(samples);
  std::vector<double> values(samples);
  for (std::size_t i = 0; i < samples; ++i) values[i] = f(h * static_cast<double>(i));
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < samples; ++i) {
    const double l = values[(i + samples - 1) % samples];
    const double r = values[(i + 1) % samples];
    if (values[i] >= l && values[i] >= r) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return values[a] > values[b]; });
  if (peaks.size() > 6) peaks.resize(6);
  double best = *std::max_element(values.begin(), values.end());
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i : peaks) {
    double a = h * (static_cast<double>(i) - 1.0);
    double b = h * (static_cast<double>(i) + 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, length); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = f(d);
      }
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

// gamma_tilde(x) solving t = gamma(x + t), by Newton from `start`.
double invert_at(const RealInterpolant& gamma, const RealInterpolant& gamma_x, double x, double start) {
  double t = start;
  for (int it = 0; it < 50; ++it) {
    const double r = t - gamma(x + t);
    const double step = r / (1.0 - gamma_x(x + t));
    t -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

// Periodic cubic spline through values at knots x_j = offset + j * spacing, evaluated on grid.
RealField periodic_spline(const RealField& values, double offset, double spacing, const Grid& grid) {
  const Eigen::Index n = values.size();
  ComplexField rhs(n);
  for (Eigen::Index j = 0; j < n; ++j)
    rhs[j] = (values[(j + 1) % n] - 2.0 * values[j] + values[(j + n - 1) % n]) / spacing;
  ComplexField c = fft(rhs);
  for (Eigen::Index m = 0; m < n; ++m)
    c[m] /= spacing / 6.0 * (4.0 + 2.0 * std::cos(2.0 * kPi * static_cast<double>(m) / static_cast<double>(n)));
  const RealField second = ifft(c).real();
  RealField out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = (grid.x(i) - offset) / spacing;
    const double fl = std::floor(s);
    const double t = s - fl;
    const Eigen::Index j = ((static_cast<Eigen::Index>(fl) % n) + n) % n;
    const Eigen::Index j1 = (j + 1) % n;
    const double a = 1.0 - t;
    out[static_cast<Eigen::Index>(i)] =
        a * values[j] + t * values[j1] +
        spacing * spacing / 6.0 * ((a * a * a - a) * second[j] + (t * t * t - t) * second[j1]);
  }
  return out;
}

}  // namespace

ComplexField compose_shift(const Grid& grid, const ComplexField& f, const RealField& gamma, ShiftDirection dir) {
  check_on_grid(grid, f.size(), "field");
  check_on_grid(grid, gamma.size(), "gamma");
  check_finite(f, "field");
  check_finite(gamma, "gamma");
  if (sup(gamma) == 0.0) return f;
  const PeriodicInterpolant interp(f, grid.length());
  return interp.at_shifted_grid(dir == ShiftDirection::Forward ? gamma : RealField(-gamma));
}

RealField compose_shift(const Grid& grid, const RealField& f, const RealField& gamma, ShiftDirection dir) {
  return compose_shift(grid, as_complex(f), gamma, dir).real();
}

RealField invert_coordinate(const Grid& grid, const RealField& gamma, const InversionOptions& options) {
  check_on_grid(grid, gamma.size(), "gamma");
  check_finite(gamma, "gamma");
  const double gx = sup(derivative(grid, gamma, 1));
  require(gx < 1.0, ErrorKind::NonInvertible,
          "Id - gamma is not invertible: sup |gamma_x| = " + std::to_string(gx) + " >= 1");
  const PeriodicInterpolant interp(as_complex(gamma), grid.length());
  RealField tilde = gamma;
  for (int it = 0; it < options.max_iters; ++it) {
    RealField next(tilde.size());
    for (Eigen::Index i = 0; i < tilde.size(); ++i)
      next[i] = interp(grid.x(static_cast<std::size_t>(i)) + tilde[i]).real();
    const double change = sup(next - tilde);
    tilde = std::move(next);
    if (change < options.tol) return tilde;
  }
  throw Error(ErrorKind::NoConvergence, "coordinate inversion did not reach the fixed-point tolerance in " +
                                            std::to_string(options.max_iters) + " iterations");
}

double inversion_defect(const Grid& grid, const RealField& gamma, const RealField& tilde) {
  const PeriodicInterpolant interp(as_complex(gamma), grid.length());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < tilde.size(); ++i)
    worst = std::max(worst, std::abs(tilde[i] - interp(grid.x(static_cast<std::size_t>(i)) + tilde[i]).real()));
  return worst;
}

PhaseField make_phase(const Grid& grid, RealField gamma) {
  PhaseField out;
  out.gamma_x = derivative(grid, gamma, 1);
  out.sup_gx = sup(out.gamma_x);
  out.gamma_t = RealField::Zero(gamma.size());
  out.gamma = std::move(gamma);
  return out;
}

const char* to_string(PhaseMethod m) {
  return m == PhaseMethod::BlochProjection ? "bloch-projection" : "windowed-xcorr";
}

PhaseMethod phase_method_from_string(const std::string& s) {
  if (s == "bloch-projection") return PhaseMethod::BlochProjection;
  if (s == "windowed-xcorr") return PhaseMethod::WindowedXcorr;
  throw Error(ErrorKind::Configuration, "unknown phase method '" + s + "'");
}

PhaseExtractor::PhaseExtractor(const PeriodicWave& wave, const Grid& grid, PhaseOptions options)
    : wave_(wave), grid_(grid), options_(options) {
  phi_ = wave.profile(grid);
  periods_ = wave.periods_on(grid);
  sup_phi_ = sup(phi_.cwiseAbs());
  const std::size_t per = grid.size() / periods_;
  const ComplexField adjoint_period = spectral::resample(adjoint_translation_mode(wave), per);
  adjoint_.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t p = 0; p < periods_; ++p)
    adjoint_.segment(static_cast<Eigen::Index>(p * per), static_cast<Eigen::Index>(per)) = adjoint_period;
  const double cut = options_.xi_cut_factor * 2.0 * kPi * wave.k();
  const RealField& q = grid.wavenumbers();
  taper_.resize(q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double a = std::abs(q[j]);
    if (a <= 0.5 * cut) taper_[j] = 1.0;
    else if (a >= cut) taper_[j] = 0.0;
    else taper_[j] = 0.5 * (1.0 + std::cos(kPi * (a - 0.5 * cut) / (0.5 * cut)));
  }
}

RealField PhaseExtractor::lowpass(const RealField& g) const {
  ComplexField c = fft(as_complex(g));
  c.array() *= taper_.cast<std::complex<double>>();
  return ifft(c).real();
}

RealField PhaseExtractor::bloch_projection(const ComplexField& psi, const RealField* warm_start) const {
  RealField gamma = warm_start ? *warm_start : RealField::Zero(psi.size());
  for (int it = 0; it < options_.max_iters; ++it) {
    const ComplexField v = compose_shift(grid_, psi, gamma, ShiftDirection::Forward) - phi_;
    const RealField g = (adjoint_.real().array() * v.real().array() + adjoint_.imag().array() * v.imag().array()).matrix();
    RealField next = lowpass(gamma - g);
    const double change = sup(next - gamma);
    gamma = std::move(next);
    if (change < options_.tol) return gamma;
  }
  throw Error(ErrorKind::NoConvergence, "bloch-projection phase iteration did not converge");
}

RealField PhaseExtractor::windowed_xcorr(const ComplexField& psi) const {
  const std::size_t per = grid_.size() / periods_;
  const double period = wave_.period();
  const ComplexField base = fft(wave_.period_values(per));
  const std::size_t fine = 8 * per;
  RealField shifts(static_cast<Eigen::Index>(periods_));
  const auto m_of = [per](std::size_t j) {
    return static_cast<double>(j <= per / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(per));
  };
  for (std::size_t w = 0; w < periods_; ++w) {
    const ComplexField window = fft(ComplexField(psi.segment(static_cast<Eigen::Index>(w * per), static_cast<Eigen::Index>(per))));
    ComplexField s = window.conjugate().cwiseProduct(base);
    s[static_cast<Eigen::Index>(per / 2)] = 0.0;
    ComplexField padded = ComplexField::Zero(static_cast<Eigen::Index>(fine));
    for (std::size_t j = 0; j < per; ++j) {
      const long m = static_cast<long>(m_of(j));
      padded[m >= 0 ? m : static_cast<long>(fine) + m] = s[static_cast<Eigen::Index>(j)];
    }
    ComplexField r(static_cast<Eigen::Index>(fine));
    fft_plan(fine).forward(padded.data(), r.data());
    Eigen::Index best = 0;
    r.real().maxCoeff(&best);
    double c = period * static_cast<double>(best) / static_cast<double>(fine);
    for (int it = 0; it < 30; ++it) {
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t j = 0; j < per; ++j) {
        const double w2 = 2.0 * kPi * m_of(j) / period;
        const std::complex<double> e = s[static_cast<Eigen::Index>(j)] * std::exp(std::complex<double>(0.0, -w2 * c));
        d1 += (std::complex<double>(0.0, -w2) * e).real();
        d2 += (-w2 * w2 * e).real();
      }
      if (d2 >= 0) break;
      const double step = d1 / d2;
      c -= step;
      if (std::abs(step) < 1e-15 * period) break;
    }
    c -= period * std::round(c / period);
    if (w > 0) c -= period * std::round((c - shifts[static_cast<Eigen::Index>(w - 1)]) / period);
    shifts[static_cast<Eigen::Index>(w)] = c;
  }
  return periodic_spline(shifts, 0.5 * period, period, grid_);
}

PhaseField PhaseExtractor::extract(const ComplexField& psi, const RealField* warm_start) const {
  check_on_grid(grid_, psi.size(), "state");
  check_finite(psi, "state");
  const double dev = sup((psi - phi_).cwiseAbs());
  require(dev <= options_.threshold * sup_phi_, ErrorKind::PhaseUndefined,
          "state is too far from the wave orbit (sup |psi - phi| = " + std::to_string(dev) + ")");
  RealField gamma = options_.method == PhaseMethod::BlochProjection ? bloch_projection(psi, warm_start)
                                                                    : windowed_xcorr(psi);
  PhaseField out = make_phase(grid_, std::move(gamma));
  require(out.sup_gx < 1.0, ErrorKind::SteepPhase,
          "extracted phase has sup |gamma_x| = " + std::to_string(out.sup_gx) + " >= 1");
  return out;
}

PhaseField extract_phase(const FieldState& state, const PeriodicWave& wave, const PhaseOptions& options) {
  return PhaseExtractor(wave, state.grid, options).extract(state.psi);
}

std::vector<PhaseField> phase_series(const Trajectory& traj, const PeriodicWave& wave, const PhaseOptions& options) {
  const PhaseExtractor extractor(wave, traj.grid, options);
  std::vector<PhaseField> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    out.push_back(extractor.extract(traj.states[i], i > 0 ? &out.back().gamma : nullptr));
  const std::size_t n = out.size();
  if (n >= 3) {
    for (std::size_t i = 1; i + 1 < n; ++i)
      out[i].gamma_t = (out[i + 1].gamma - out[i - 1].gamma) / (traj.times[i + 1] - traj.times[i - 1]);
    const double h0 = traj.times[1] - traj.times[0];
    const double h1 = traj.times[n - 1] - traj.times[n - 2];
    out[0].gamma_t = (-3.0 * out[0].gamma + 4.0 * out[1].gamma - out[2].gamma) / (2.0 * h0);
    out[n - 1].gamma_t = (3.0 * out[n - 1].gamma - 4.0 * out[n - 2].gamma + out[n - 3].gamma) / (2.0 * h1);
  } else if (n == 2) {
    out[0].gamma_t = out[1].gamma_t = (out[1].gamma - out[0].gamma) / (traj.times[1] - traj.times[0]);
  }
  return out;
}

ModulatedPair modulated_pair(const Grid& grid, const ComplexField& psi, const ComplexField& phi, const PhaseField& phase) {
  require(phase.sup_gx < 1.0, ErrorKind::SteepPhase, "modulated_pair needs sup |gamma_x| < 1");
  ModulatedPair out;
  out.v_inverse = compose_shift(grid, psi, phase.gamma, ShiftDirection::Forward) - phi;
  out.v_forward = psi - compose_shift(grid, phi, phase.gamma, ShiftDirection::Backward);
  out.phase = phase;
  return out;
}

LpEquivalenceReport check_equivalence_lp(const Grid& grid, const ComplexField& psi, const ComplexField& phi,
                                         const RealField& gamma, double p) {
  check_on_grid(grid, psi.size(), "psi");
  check_on_grid(grid, phi.size(), "phi");
  check_on_grid(grid, gamma.size(), "gamma");
  require(p >= 1.0, ErrorKind::Precondition, "equivalence check needs p >= 1");
  LpEquivalenceReport r;
  r.p = p;
  const RealField gx = derivative(grid, gamma, 1);
  r.sup_gx = sup(gx);
  require(r.sup_gx < 1.0, ErrorKind::NonInvertible, "equivalence check needs sup |gamma_x| < 1");
  r.sup_gamma = sup(gamma);
  r.lp_gx = lp_norm(grid, gx, p);

  const std::size_t fine_n = 4 * grid.size();
  const Grid fine(fine_n, grid.length());
  const PeriodicInterpolant psi_i(psi, grid.length());
  const PeriodicInterpolant phi_i(phi, grid.length());
  const RealInterpolant gam_i(gamma, grid.length());
  const RealInterpolant gx_i(gx, grid.length());
  const PeriodicInterpolant phix_i(derivative(grid, phi, 1), grid.length());
  r.sup_phix = refined_sup([&](double x) { return std::abs(phix_i(x)); }, grid.length(), fine_n);

  const RealField gamma_fine = spectral::resample(gamma, fine_n);
  const RealField tilde_fine = invert_coordinate(fine, gamma_fine);
  const auto base_at = [&](double y) { return psi_i(y - gam_i(y)) - phi_i(y); };
  const auto inverse_at = [&](double x, double t) { return psi_i(x) - phi_i(x + t); };
  const auto shifted_at = [&](double x) { return psi_i(x) - phi_i(x + gam_i(x)); };

  if (std::isinf(p)) {
    const RealInterpolant tilde_i(tilde_fine, grid.length());
    r.base = refined_sup([&](double y) { return std::abs(base_at(y)); }, grid.length(), fine_n);
    r.inverse_lhs = refined_sup(
        [&](double x) { return std::abs(inverse_at(x, invert_at(gam_i, gx_i, x, tilde_i(x)))); }, grid.length(), fine_n);
    r.shifted_lhs = refined_sup([&](double x) { return std::abs(shifted_at(x)); }, grid.length(), fine_n);
  } else {
    double sb = 0.0, si = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < fine_n; ++i) {
      const double x = fine.x(i);
      sb += std::pow(std::abs(base_at(x)), p);
      si += std::pow(std::abs(inverse_at(x, tilde_fine[static_cast<Eigen::Index>(i)])), p);
      ss += std::pow(std::abs(shifted_at(x)), p);
    }
    const double h = fine.spacing();
    r.base = std::pow(sb * h, 1.0 / p);
    r.inverse_lhs = std::pow(si * h, 1.0 / p);
    r.shifted_lhs = std::pow(ss * h, 1.0 / p);
  }

  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double up = std::pow(1.0 + r.sup_gx, inv_p);
  const double down = std::pow(1.0 - r.sup_gx, inv_p);
  const double printed = std::pow(1.0 - r.sup_gx, -inv_p);
  r.correction = r.sup_phix * up * r.sup_gamma * r.lp_gx;
  r.slack_upper_inverse = up * r.base - r.inverse_lhs;
  r.slack_upper_shifted = up * r.base + r.correction - r.shifted_lhs;
  r.slack_lower_inverse = r.inverse_lhs - down * r.base;
  r.slack_lower_shifted = r.shifted_lhs - (down * r.base - r.correction);
  r.slack_lower_inverse_printed = r.inverse_lhs - printed * r.base;
  r.slack_lower_shifted_printed = r.shifted_lhs - (printed * r.base - r.correction);
  const double tol = -1e-8;
  r.violation = r.slack_upper_inverse < tol || r.slack_upper_shifted < tol || r.slack_lower_inverse < tol ||
                r.slack_lower_shifted < tol;
  return r;
}

HkEquivalenceReport check_equivalence_hk(const Grid& grid, const ComplexField& psi, const ComplexField& phi,
                                         const RealField& gamma, int k) {
  require(k >= 0 && k <= 4, ErrorKind::Precondition, "H^k equivalence supports 0 <= k <= 4");
  const RealField gx = derivative(grid, gamma, 1);
  require(sup(gx) < 1.0, ErrorKind::NonInvertible, "equivalence check needs sup |gamma_x| < 1");
  const std::size_t fine_n = 4 * grid.size();
  const Grid fine(fine_n, grid.length());
  const ComplexField psi_f = spectral::resample(psi, fine_n);
  const ComplexField phi_f = spectral::resample(phi, fine_n);
  const RealField gamma_f = spectral::resample(gamma, fine_n);
  const ComplexField base = compose_shift(fine, psi_f, gamma_f, ShiftDirection::Backward) - phi_f;
  const ComplexField shifted = psi_f - compose_shift(fine, phi_f, gamma_f, ShiftDirection::Forward);
  HkEquivalenceReport r;
  r.k = k;
  r.base = sobolev_norm(fine, base, k);
  r.shifted_lhs = sobolev_norm(fine, shifted, k);
  r.gamma_term = sobolev_norm(grid, gx, k + 1);
  const double upper = r.base + r.gamma_term > 0 ? r.shifted_lhs / (r.base + r.gamma_term) : 1.0;
  const double lower = r.shifted_lhs + r.gamma_term > 0 ? r.base / (r.shifted_lhs + r.gamma_term) : 1.0;
  r.constant = std::max({1.0, upper, lower});
  return r;
}

EquivalenceSample make_equivalence_sample(std::uint64_t seed, std::uint64_t id, const CorpusOptions& o,
                                          std::size_t n_points) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Grid base(o.n_points, o.length);
  const auto n = static_cast<Eigen::Index>(o.n_points);
  const auto random_field = [&](bool real, double decay) {
    ComplexField c = ComplexField::Zero(n);
    for (int m = -o.max_mode; m <= o.max_mode; ++m) {
      const double amp = 1.0 / std::pow(1.0 + std::abs(m), decay);
      c[m >= 0 ? m : n + m] = amp * std::complex<double>(normal(rng), normal(rng));
    }
    if (real) {
      for (int m = 1; m <= o.max_mode; ++m) c[n - m] = std::conj(c[m]);
      c[0] = c[0].real();
    }
    return ComplexField(ifft(c));
  };
  EquivalenceSample s;
  ComplexField phi = random_field(false, 1.0);
  phi.array() += std::complex<double>(1.0, 0.5);
  RealField gamma = random_field(true, 1.0).real();
  const double target = o.max_gx * (0.02 + 0.98 * uniform(rng));
  double scale = target / sup(derivative(base, gamma, 1));
  if (o.hk_gamma_bound > 0) {
    const double h = sobolev_norm(base, RealField(derivative(base, gamma, 1)), o.hk_order + 1);
    scale = std::min(scale, o.hk_gamma_bound / h);
  }
  gamma *= scale;
  RealField wobble = random_field(true, 2.0).real();
  wobble *= 0.3 / std::max(1.0, sup(wobble));
  const RealField shift = (gamma.array() * (1.0 + wobble.array())).matrix();
  ComplexField psi = compose_shift(base, phi, shift, ShiftDirection::Forward);
  psi += 0.05 * random_field(false, 1.5);
  s.psi = spectral::resample(psi, n_points);
  s.phi = spectral::resample(phi, n_points);
  s.gamma = spectral::resample(gamma, n_points);
  return s;
}

CorpusResult run_equivalence_corpus(std::uint64_t seed, std::size_t samples, const std::vector<double>& p_values,
                                    const CorpusOptions& options, std::size_t n_points, int jobs) {
  const Grid grid(n_points, options.length);
  CorpusResult out;
  out.lp.resize(samples * p_values.size());
  out.hk.resize(samples);
  out.roundtrip_error.resize(samples);
  parallel_for(samples, jobs, [&](std::size_t i) {
    const EquivalenceSample s = make_equivalence_sample(seed, i, options, n_points);
    for (std::size_t j = 0; j < p_values.size(); ++j)
      out.lp[i * p_values.size() + j] = check_equivalence_lp(grid, s.psi, s.phi, s.gamma, p_values[j]);
    out.hk[i] = check_equivalence_hk(grid, s.psi, s.phi, s.gamma, options.hk_order);
    out.roundtrip_error[i] = inversion_defect(grid, s.gamma, invert_coordinate(grid, s.gamma));
  });
  for (const auto& r : out.lp) out.violations += r.violation ? 1 : 0;
  for (const auto& r : out.hk) out.max_hk_constant = std::max(out.max_hk_constant, r.constant);
  for (double e : out.roundtrip_error) out.max_roundtrip = std::max(out.max_roundtrip, e);
  return out;
}

nlohmann::json to_json(const LpEquivalenceReport& r) {
  return {{"p", std::isinf(r.p) ? nlohmann::json("inf") : nlohmann::json(r.p)},
          {"sup_gamma_x", r.sup_gx},
          {"sup_phi_x", r.sup_phix},
          {"sup_gamma", r.sup_gamma},
          {"lp_gamma_x", r.lp_gx},
          {"base", r.base},
          {"inverse_lhs", r.inverse_lhs},
          {"shifted_lhs", r.shifted_lhs},
          {"correction", r.correction},
          {"slack_upper_inverse", r.slack_upper_inverse},
          {"slack_upper_shifted", r.slack_upper_shifted},
          {"slack_lower_inverse", r.slack_lower_inverse},
          {"slack_lower_shifted", r.slack_lower_shifted},
          {"slack_lower_inverse_printed", r.slack_lower_inverse_printed},
          {"slack_lower_shifted_printed", r.slack_lower_shifted_printed},
          {"violation", r.violation}};
}

void write_lp_csv(const std::vector<LpEquivalenceReport>& reports, std::size_t per_sample, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Configuration, "cannot write " + path);
  out << "sample,p,sup_gamma_x,sup_phi_x,sup_gamma,lp_gamma_x,base,inverse_lhs,shifted_lhs,correction,"
         "slack_upper_inverse,slack_upper_shifted,slack_lower_inverse,slack_lower_shifted,"
         "slack_lower_inverse_printed,slack_lower_shifted_printed,violation\n"
      << std::setprecision(17);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out << i / std::max<std::size_t>(per_sample, 1) << ',' << r.p << ',' << r.sup_gx << ',' << r.sup_phix << ','
        << r.sup_gamma << ',' << r.lp_gx << ',' << r.base << ',' << r.inverse_lhs << ',' << r.shifted_lhs << ','
        << r.correction << ',' << r.slack_upper_inverse << ',' << r.slack_upper_shifted << ','
        << r.slack_lower_inverse << ',' << r.slack_lower_shifted << ',' << r.slack_lower_inverse_printed << ','
        << r.slack_lower_shifted_printed << ',' << (r.violation ? 1 : 0) << '\n';
  }
}

void write_hk_csv(const std::vector<HkEquivalenceReport>& reports, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Configuration, "cannot write " + path);
  out << "sample,k,base,shifted_lhs,gamma_term,constant\n" << std::setprecision(17);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out << i << ',' << r.k << ',' << r.base << ',' << r.shifted_lhs << ',' << r.gamma_term << ',' << r.constant << '\n';
  }
}

}  // namespace lle
