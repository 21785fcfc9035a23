#include "lle/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "lle/error.hpp"
#include "lle/fft.hpp"
#include "lle/parallel.hpp"

namespace lle {

namespace {

constexpr double kPi = std::numbers::pi;

struct EigenData {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

EigenData solve_sorted(const Eigen::MatrixXcd& a, bool vectors) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, vectors);
  require(solver.info() == Eigen::Success, ErrorKind::Backend, "complex eigen-solver failed");
  const Eigen::VectorXcd& ev = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ev.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return ev[i].real() > ev[j].real(); });
  EigenData out;
  out.values.resize(ev.size());
  if (vectors) out.vectors.resize(a.rows(), ev.size());
  for (Eigen::Index r = 0; r < ev.size(); ++r) {
    out.values[r] = ev[order[static_cast<std::size_t>(r)]];
    if (vectors) out.vectors.col(r) = solver.eigenvectors().col(order[static_cast<std::size_t>(r)]).normalized();
  }
  return out;
}

struct TrackStep {
  int index = 0;
  bool ambiguous = false;
};

// Picks the eigenvector of `next` with maximal overlap with `prev`; near-ties go to the
// eigenvalue closest to the previous one.
TrackStep track(const Eigen::VectorXcd& prev_vec, std::complex<double> prev_val, const EigenData& next) {
  const Eigen::VectorXd overlap = (next.vectors.adjoint() * prev_vec).cwiseAbs();
  Eigen::Index best = 0;
  overlap.maxCoeff(&best);
  TrackStep step;
  double best_dist = std::abs(next.values[best] - prev_val);
  for (Eigen::Index j = 0; j < overlap.size(); ++j) {
    if (j == best || overlap[j] < overlap[best] - 1e-3) continue;
    const double dist = std::abs(next.values[j] - prev_val);
    if (dist < best_dist) {
      best = j;
      best_dist = dist;
    }
  }
  step.index = static_cast<int>(best);
  double second = 0.0;
  for (Eigen::Index j = 0; j < overlap.size(); ++j)
    if (j != best) second = std::max(second, overlap[j]);
  step.ambiguous = overlap[best] < 0.5 || second > overlap[best] - 0.05;
  return step;
}

int nearest_to_zero(const Eigen::VectorXcd& values) {
  Eigen::Index best = 0;
  values.cwiseAbs().minCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

LinearizedOperator::LinearizedOperator(PeriodicWave wave) : wave_(std::move(wave)) {
  fine_ = std::max<std::size_t>(4 * wave_.modes(), 1024);
  const ComplexField phi = wave_.period_values(fine_);
  const Eigen::ArrayXd a = phi.real().array();
  const Eigen::ArrayXd b = phi.imag().array();
  q11_ = fft(ComplexField((3 * a * a + b * b).matrix().cast<std::complex<double>>()));
  q12_ = fft(ComplexField((2 * a * b).matrix().cast<std::complex<double>>()));
  q22_ = fft(ComplexField((a * a + 3 * b * b).matrix().cast<std::complex<double>>()));
}

std::complex<double> LinearizedOperator::potential_coeff(int entry, long m) const {
  const auto n = static_cast<long>(fine_);
  if (std::abs(m) >= n / 2) return 0.0;
  const auto idx = static_cast<Eigen::Index>(m >= 0 ? m : m + n);
  switch (entry) {
    case 11: return q11_[idx];
    case 12: return q12_[idx];
    case 22: return q22_[idx];
    default: throw Error(ErrorKind::Precondition, "potential entry must be 11, 12 or 22");
  }
}

std::pair<RealField, RealField> LinearizedOperator::apply_l(const Grid& grid, const RealField& ur,
                                                            const RealField& ui) const {
  const ComplexField phi = wave_.profile(grid);
  const Eigen::ArrayXd a = phi.real().array();
  const Eigen::ArrayXd b = phi.imag().array();
  const auto& p = wave_.params();
  const RealField urxx = derivative(grid, ur, 2);
  const RealField uixx = derivative(grid, ui, 2);
  RealField lr = -p.beta * urxx - p.alpha * ur;
  RealField li = -p.beta * uixx - p.alpha * ui;
  lr.array() += (3 * a * a + b * b) * ur.array() + 2 * a * b * ui.array();
  li.array() += 2 * a * b * ur.array() + (a * a + 3 * b * b) * ui.array();
  return {lr, li};
}

std::pair<RealField, RealField> LinearizedOperator::apply(const Grid& grid, const RealField& ur,
                                                          const RealField& ui) const {
  auto [lr, li] = apply_l(grid, ur, ui);
  return {RealField(-ur - li), RealField(-ui + lr)};
}

Eigen::MatrixXcd bloch_matrix(const LinearizedOperator& op, double xi, int n_modes) {
  const double k = op.wave().k();
  require(n_modes >= 32 && n_modes % 2 == 0, ErrorKind::Precondition, "bloch_matrix needs an even n_modes >= 32");
  require(std::abs(xi) <= k * kPi * (1 + 1e-12), ErrorKind::Precondition, "Floquet exponent outside (-k pi, k pi]");
  const auto& p = op.wave().params();
  const Eigen::Index n = n_modes;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long mi = static_cast<long>(i) - n_modes / 2;
    const double mu = xi + 2 * kPi * k * static_cast<double>(mi);
    const double diag = p.beta * mu * mu - p.alpha;
    for (Eigen::Index j = 0; j < n; ++j) {
      const long d = mi - (static_cast<long>(j) - n_modes / 2);
      const auto q11 = op.potential_coeff(11, d);
      const auto q12 = op.potential_coeff(12, d);
      const auto q22 = op.potential_coeff(22, d);
      const double dd = i == j ? diag : 0.0;
      const double id = i == j ? 1.0 : 0.0;
      // A = (-I - L21, -L22; L11, -I + L12)
      a(i, j) = -id - q12;
      a(i, n + j) = -(dd + q22);
      a(n + i, j) = dd + q11;
      a(n + i, n + j) = -id + q12;
    }
  }
  return a;
}

Eigen::VectorXcd bloch_coefficients(const ComplexField& period_values, int n_modes) {
  const ComplexField c = fft(period_values);
  const auto m = static_cast<long>(c.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    const long mode = i - n_modes / 2;
    if (std::abs(mode) >= m / 2) continue;
    out[i] = c[mode >= 0 ? mode : mode + m];
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
  }
  return "unknown";
}

CurvatureFit fit_critical_curve(const LinearizedOperator& op, double xi_fit, int n_modes, int samples) {
  require(xi_fit > 0 && samples >= 4, ErrorKind::Precondition, "fit window needs xi_fit > 0 and >= 4 samples");
  CurvatureFit fit;
  EigenData prev = solve_sorted(bloch_matrix(op, 0.0, n_modes), true);
  int idx = nearest_to_zero(prev.values);
  fit.lambda0 = std::abs(prev.values[idx]);
  double other = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < prev.values.size(); ++j)
    if (j != idx) other = std::max(other, prev.values[j].real());
  fit.gap = -other;
  fit.xi.push_back(0.0);
  fit.lambda.push_back(prev.values[idx]);
  for (int s = 1; s < samples; ++s) {
    const double xi = xi_fit * s / (samples - 1);
    EigenData next = solve_sorted(bloch_matrix(op, xi, n_modes), true);
    const TrackStep step = track(prev.vectors.col(idx), prev.values[idx], next);
    idx = step.index;
    fit.xi.push_back(xi);
    fit.lambda.push_back(next.values[idx]);
    prev = std::move(next);
  }
  Eigen::MatrixXd design(samples, 2);
  Eigen::VectorXd re(samples);
  for (int s = 0; s < samples; ++s) {
    design(s, 0) = 1.0;
    design(s, 1) = fit.xi[static_cast<std::size_t>(s)] * fit.xi[static_cast<std::size_t>(s)];
    re[s] = fit.lambda[static_cast<std::size_t>(s)].real();
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(re);
  fit.d = -coef[1];
  const double scale = re.norm();
  fit.relative_residual = scale > 0 ? (design * coef - re).norm() / scale : 0.0;
  for (int s = 1; s < samples; ++s) {
    const double xi = fit.xi[static_cast<std::size_t>(s)];
    fit.cubic_constant = std::max(fit.cubic_constant,
                                  std::abs(fit.lambda[static_cast<std::size_t>(s)] + fit.d * xi * xi) / (xi * xi * xi));
  }
  return fit;
}

BlochSpectrum assess_stability(const LinearizedOperator& op, int n_xi, int n_modes,
                               const StabilityOptions& options) {
  require(n_xi >= 64, ErrorKind::Precondition, "assess_stability needs n_xi >= 64");
  const double k = op.wave().k();
  BlochSpectrum s;
  s.k = k;
  for (int j = 0; j < n_xi; ++j) s.xi.push_back(-k * kPi + 2 * k * kPi * (j + 1) / n_xi);
  for (double& xi : s.xi)
    if (std::abs(xi) < 1e-14 * k) xi = 0.0;
  if (std::find(s.xi.begin(), s.xi.end(), 0.0) == s.xi.end()) {
    s.xi.push_back(0.0);
    std::sort(s.xi.begin(), s.xi.end());
  }
  const std::size_t nx = s.xi.size();
  const auto i0 = static_cast<std::size_t>(std::find(s.xi.begin(), s.xi.end(), 0.0) - s.xi.begin());
  s.eigenvalues.resize(nx);
  s.critical_index.assign(nx, 0);

  const EigenData zero = solve_sorted(bloch_matrix(op, 0.0, n_modes), true);
  s.eigenvalues[i0] = zero.values;
  s.critical_index[i0] = nearest_to_zero(zero.values);
  bool ambiguous = false;
  const double fit_window = options.xi_fit_factor * k;

  // Walk outward from xi = 0 in both directions, solving a batch in parallel and then tracking.
  const std::size_t batch = resolve_jobs(options.jobs);
  for (int dir : {+1, -1}) {
    std::vector<std::size_t> order;
    for (long i = static_cast<long>(i0) + dir; i >= 0 && i < static_cast<long>(nx); i += dir)
      order.push_back(static_cast<std::size_t>(i));
    Eigen::VectorXcd prev_vec = zero.vectors.col(s.critical_index[i0]);
    std::complex<double> prev_val = zero.values[s.critical_index[i0]];
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      std::vector<EigenData> solved(count);
      parallel_for(count, options.jobs, [&](std::size_t b) {
        solved[b] = solve_sorted(bloch_matrix(op, s.xi[order[start + b]], n_modes), true);
      });
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t i = order[start + b];
        const TrackStep step = track(prev_vec, prev_val, solved[b]);
        if (step.ambiguous && std::abs(s.xi[i]) <= fit_window) ambiguous = true;
        s.eigenvalues[i] = solved[b].values;
        s.critical_index[i] = step.index;
        prev_vec = solved[b].vectors.col(step.index);
        prev_val = solved[b].values[step.index];
      }
    }
  }

  s.lambda0 = std::abs(s.critical(i0));
  double other = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < s.eigenvalues[i0].size(); ++j)
    if (j != s.critical_index[i0]) other = std::max(other, s.eigenvalues[i0][j].real());
  s.gap = -other;
  s.max_re_nonzero = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nx; ++i)
    if (i != i0) s.max_re_nonzero = std::max(s.max_re_nonzero, s.eigenvalues[i][0].real());

  const CurvatureFit fit = fit_critical_curve(op, fit_window, n_modes, options.fit_samples);
  s.curvature = fit.d;
  s.fit_residual = fit.relative_residual;
  s.cubic_constant = fit.cubic_constant;
  s.xi_fit = fit_window;

  std::vector<std::string> issues;
  const bool growing = s.max_re_nonzero > options.margin || -s.gap > options.margin;
  if (s.max_re_nonzero >= 0) issues.push_back("max Re lambda at xi != 0 is " + std::to_string(s.max_re_nonzero));
  if (s.gap < options.delta_gap)
    issues.push_back("second eigenvalue at xi = 0 has Re " + std::to_string(-s.gap) + " >= -delta_gap");
  if (s.lambda0 >= 1e-8) issues.push_back("no neutral eigenvalue at xi = 0 (|lambda_c(0)| = " + std::to_string(s.lambda0) + ")");
  if (!(s.curvature > 0)) issues.push_back("critical curvature d = " + std::to_string(s.curvature) + " is not positive");
  if (s.fit_residual >= 1e-2) issues.push_back("quadratic fit residual " + std::to_string(s.fit_residual) + " >= 1e-2");
  if (ambiguous) issues.push_back("ambiguous critical-curve continuation near xi = 0 (eigenvalue collision)");
  if (growing) {
    s.verdict = Verdict::Unstable;
  } else if (issues.empty()) {
    s.verdict = Verdict::Stable;
  } else {
    s.verdict = Verdict::Marginal;
  }
  for (const auto& msg : issues) s.diagnostic += (s.diagnostic.empty() ? "" : "; ") + msg;
  return s;
}

double high_freq_rate(const BlochSpectrum& spectrum, double low_cut) {
  require(spectrum.verdict == Verdict::Stable, ErrorKind::Precondition, "high_freq_rate needs a stable spectrum");
  require(low_cut > 0, ErrorKind::Precondition, "low_cut must be positive");
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.xi.size(); ++i) {
    const bool skip_critical = std::abs(spectrum.xi[i]) < low_cut;
    for (Eigen::Index j = 0; j < spectrum.eigenvalues[i].size(); ++j) {
      if (skip_critical && j == spectrum.critical_index[i]) continue;
      top = std::max(top, spectrum.eigenvalues[i][j].real());
    }
  }
  return -top;
}

double whitham_diffusion(const PeriodicWave& wave, double xi_fit, int n_modes) {
  const LinearizedOperator op(wave);
  const CurvatureFit fit = fit_critical_curve(op, xi_fit, n_modes);
  bool decaying = true;
  for (std::size_t s = 1; s < fit.lambda.size(); ++s) decaying = decaying && fit.lambda[s].real() < 0;
  require(fit.lambda0 < 1e-8 && fit.gap > 1e-3 && fit.d > 0 && decaying, ErrorKind::Precondition,
          "wave is not diffusively spectrally stable near xi = 0 (d = " + std::to_string(fit.d) +
              ", gap = " + std::to_string(fit.gap) + ")");
  require(fit.relative_residual <= 1e-2, ErrorKind::FitQuality,
          "quadratic fit of the critical curve has relative residual " + std::to_string(fit.relative_residual));
  return fit.d;
}

ComplexField adjoint_translation_mode(const PeriodicWave& wave) {
  const ComplexField phi = wave.period_values();
  const Eigen::MatrixXd jac = steady_jacobian(wave.params(), wave.k(), phi);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullU);
  const Eigen::VectorXd u = svd.matrixU().col(jac.rows() - 1);
  const Eigen::Index m = phi.size();
  ComplexField mode(m);
  for (Eigen::Index i = 0; i < m; ++i) mode[i] = {u[i], u[m + i]};
  const ComplexField phix = wave.period_values(wave.modes(), 1);
  const double norm = (mode.real().dot(phix.real()) + mode.imag().dot(phix.imag())) / static_cast<double>(m);
  require(std::abs(norm) > 1e-12, ErrorKind::Precondition, "adjoint mode is orthogonal to phi_x");
  return mode / norm;
}

BlochMode bloch_mode(const LinearizedOperator& op, double xi, int n_modes, const Grid& grid, int rank) {
  const EigenData data = solve_sorted(bloch_matrix(op, xi, n_modes), true);
  require(rank >= 0 && rank < data.values.size(), ErrorKind::Precondition, "eigenvalue rank out of range");
  const Eigen::VectorXcd vec = data.vectors.col(rank);
  const double k = op.wave().k();
  BlochMode mode;
  mode.lambda = data.values[rank];
  mode.field_r = ComplexField::Zero(static_cast<Eigen::Index>(grid.size()));
  mode.field_i = ComplexField::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.x(p);
    std::complex<double> vr = 0.0, vi = 0.0;
    for (int i = 0; i < n_modes; ++i) {
      const double mu = xi + 2 * kPi * k * static_cast<double>(i - n_modes / 2);
      const auto e = std::exp(std::complex<double>(0.0, mu * x));
      vr += vec[i] * e;
      vi += vec[n_modes + i] * e;
    }
    mode.field_r[static_cast<Eigen::Index>(p)] = vr;
    mode.field_i[static_cast<Eigen::Index>(p)] = vi;
  }
  return mode;
}

nlohmann::json spectrum_verdict_json(const BlochSpectrum& s) {
  return {{"verdict", to_string(s.verdict)},
          {"k", s.k},
          {"n_xi", s.xi.size()},
          {"lambda_c0", s.lambda0},
          {"gap_at_zero", s.gap},
          {"max_re_nonzero_xi", s.max_re_nonzero},
          {"curvature_d", s.curvature},
          {"fit_relative_residual", s.fit_residual},
          {"cubic_constant", s.cubic_constant},
          {"xi_fit", s.xi_fit},
          {"diagnostic", s.diagnostic}};
}

void write_spectrum_csv(const BlochSpectrum& s, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Configuration, "cannot write " + path);
  out << "xi,re,im,branch,critical\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.xi.size(); ++i)
    for (Eigen::Index j = 0; j < s.eigenvalues[i].size(); ++j)
      out << s.xi[i] << ',' << s.eigenvalues[i][j].real() << ',' << s.eigenvalues[i][j].imag() << ',' << j << ','
          << (j == s.critical_index[i] ? 1 : 0) << '\n';
}

}  // namespace lle
