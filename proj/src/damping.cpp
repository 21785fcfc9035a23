#include "lle/damping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "lle/error.hpp"
#include "lle/fft.hpp"

namespace lle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::complex<double> kI(0.0, 1.0);

ComplexField deriv_or_self(const Grid& grid, const ComplexField& u, int order) {
  return order == 0 ? u : derivative(grid, u, order);
}

// <J M a, b> with J = (0, -1; 1, 0) acting on (re, im) pairs.
double jm_inner(const Grid& grid, const MMatrix& m, const ComplexField& a, const ComplexField& b) {
  const Eigen::ArrayXd ar = a.real().array(), ai = a.imag().array();
  const Eigen::ArrayXd br = b.real().array(), bi = b.imag().array();
  const Eigen::ArrayXd p = m.m11.array() * ar + m.m12.array() * ai;
  const Eigen::ArrayXd q = m.m12.array() * ar + m.m22.array() * ai;
  return ((-q * br) + p * bi).sum() * grid.spacing();
}

// Discrete right-hand side with the same dealiased cubic as the stepper.
ComplexField rhs(const Grid& grid, const LleParams& p, const ComplexField& psi) {
  ComplexField out = -kI * p.beta * derivative(grid, psi, 2) - std::complex<double>(1.0, p.alpha) * psi;
  const ComplexField cubic = (psi.array().abs2() * psi.array()).matrix();
  out += kI * spectral::dealias(cubic);
  out.array() += p.f_pump;
  return out;
}

ComplexField linear_apply(const Grid& grid, const LleParams& p, const ComplexField& phi, const ComplexField& u) {
  ComplexField out = -kI * p.beta * derivative(grid, u, 2) - std::complex<double>(1.0, p.alpha) * u;
  const ComplexField pot =
      (2.0 * phi.array().abs2() * u.array() + phi.array().square() * u.array().conjugate()).matrix();
  out += kI * spectral::dealias(pot);
  return out;
}

MMatrix m_variation(const ComplexField& phi, const ComplexField& dphi) {
  const Eigen::ArrayXd a = phi.real().array(), b = phi.imag().array();
  const Eigen::ArrayXd da = dphi.real().array(), db = dphi.imag().array();
  MMatrix m;
  m.m11 = (-4.0 * (da * b + a * db)).matrix();
  m.m12 = (4.0 * (a * da - b * db)).matrix();
  m.m22 = -m.m11;
  return m;
}

// d/dt E_j along u_t = w, with M varying at rate m_t (may be null).
double energy_rate(const Grid& grid, const ComplexField& u, const ComplexField& w, const MMatrix& m,
                   const MMatrix* m_t, int j, double beta) {
  const ComplexField uj = derivative(grid, u, j);
  const ComplexField wj = derivative(grid, w, j);
  const ComplexField ul = deriv_or_self(grid, u, j - 1);
  const ComplexField wl = deriv_or_self(grid, w, j - 1);
  double out = 2.0 * inner(grid, uj, wj);
  out -= (jm_inner(grid, m, wl, ul) + jm_inner(grid, m, ul, wl)) / (2.0 * beta);
  if (m_t) out -= jm_inner(grid, *m_t, ul, ul) / (2.0 * beta);
  return out;
}

double l2(const Grid& grid, const ComplexField& f) { return std::sqrt(inner(grid, f, f)); }

double w_inf_norm(const Grid& grid, const ComplexField& f, int order) {
  double s = f.cwiseAbs().maxCoeff();
  for (int m = 1; m <= order; ++m) s += derivative(grid, f, m).cwiseAbs().maxCoeff();
  return s;
}

std::vector<double> memory_integral(const std::vector<double>& t, const std::vector<double>& f, double theta) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = t[i] - t[i - 1];
    const double decay = std::exp(-theta * h);
    out[i] = decay * out[i - 1] + 0.5 * h * (decay * f[i - 1] + f[i]);
  }
  return out;
}

bool multiplies_initial(DampingVariable v) { return v != DampingVariable::Unmodulated; }

// RHS of the integral inequality at one time without the factor C on the memory term split out.
struct RhsParts {
  double initial;  // e^{-theta t} X(0)
  double scaled;   // terms multiplied by C
};

std::vector<RhsParts> rhs_parts(const DampingReport& r, double theta) {
  const auto mem = memory_integral(r.times, r.forcing, theta);
  std::vector<RhsParts> out(r.times.size());
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double init = std::exp(-theta * (r.times[i] - r.times.front())) * r.lhs.front();
    double scaled = mem[i];
    if (!r.instantaneous.empty()) scaled += r.instantaneous[i];
    if (multiplies_initial(r.variable)) out[i] = {0.0, scaled + init};
    else out[i] = {init, scaled};
  }
  return out;
}

double exact_c_min(const DampingReport& r, double theta) {
  const auto parts = rhs_parts(r, theta);
  const double scale = std::max(1e-300, *std::max_element(r.lhs.begin(), r.lhs.end(),
                                                          [](double a, double b) { return std::abs(a) < std::abs(b); }));
  const double tol = std::max(1e-12 * std::abs(scale), r.noise_floor);
  double c = multiplies_initial(r.variable) ? 1.0 : 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double need = r.lhs[i] - parts[i].initial;
    if (need <= tol) continue;
    if (parts[i].scaled <= 0.0) return kInf;
    c = std::max(c, need / parts[i].scaled);
  }
  return c;
}

}  // namespace

MMatrix m_matrix(const RealField& a, const RealField& b) {
  require(a.size() == b.size(), ErrorKind::InvalidField, "m_matrix: size mismatch");
  MMatrix m;
  m.m11 = (-4.0 * a.array() * b.array()).matrix();
  m.m12 = (2.0 * (a.array().square() - b.array().square())).matrix();
  m.m22 = -m.m11;
  return m;
}

MMatrix m_matrix(const ComplexField& phi) { return m_matrix(RealField(phi.real()), RealField(phi.imag())); }

double energy(const Grid& grid, const ComplexField& u, const MMatrix* m, int j, double beta) {
  require(j >= 1 && j <= 6, ErrorKind::Parameter, "energy order must lie in 1..6");
  require(beta != 0.0, ErrorKind::Parameter, "energy needs beta != 0");
  check_on_grid(grid, u.size(), "energy");
  const ComplexField uj = derivative(grid, u, j);
  double e = inner(grid, uj, uj);
  if (m) {
    const ComplexField ul = deriv_or_self(grid, u, j - 1);
    e -= jm_inner(grid, *m, ul, ul) / (2.0 * beta);
  }
  return e;
}

double energy(const Grid& grid, const ComplexField& u, const ComplexField& phi, int j, double beta) {
  const MMatrix m = m_matrix(phi);
  return energy(grid, u, &m, j, beta);
}

const char* to_string(DampingVariable v) {
  switch (v) {
    case DampingVariable::Unmodulated: return "unmodulated";
    case DampingVariable::Forward: return "forward";
    case DampingVariable::Inverse: return "inverse";
  }
  return "?";
}

DampingVariable damping_variable_from_string(const std::string& s) {
  if (s == "unmodulated") return DampingVariable::Unmodulated;
  if (s == "forward") return DampingVariable::Forward;
  if (s == "inverse") return DampingVariable::Inverse;
  throw Error(ErrorKind::Configuration, "unknown damping variable '" + s + "'");
}

VariableSeries variable_series(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable,
                               const std::vector<PhaseField>& phases) {
  require(traj.size() > 0, ErrorKind::Precondition, "empty trajectory");
  const bool modulated = variable != DampingVariable::Unmodulated;
  require(!modulated || phases.size() == traj.size(), ErrorKind::Precondition,
          "modulated variable needs one phase per snapshot");
  VariableSeries s{variable, traj.grid, traj.times, {}, {}, modulated ? phases : std::vector<PhaseField>{}};
  const ComplexField phi = wave.profile(traj.grid);
  s.u.reserve(traj.size());
  s.background.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ComplexField& psi = traj.states[i];
    switch (variable) {
      case DampingVariable::Unmodulated:
        s.u.push_back(psi - phi);
        s.background.push_back(phi);
        break;
      case DampingVariable::Forward: {
        ComplexField shifted = compose_shift(traj.grid, phi, phases[i].gamma, ShiftDirection::Backward);
        s.u.push_back(psi - shifted);
        s.background.push_back(std::move(shifted));
        break;
      }
      case DampingVariable::Inverse:
        s.u.push_back(compose_shift(traj.grid, psi, phases[i].gamma, ShiftDirection::Forward) - phi);
        s.background.push_back(phi);
        break;
    }
  }
  return s;
}

double phase_rate_norm(const Grid& grid, const PhaseField& phase, int s) {
  const double a = sobolev_norm(grid, phase.gamma_x, s);
  const double b = phase.gamma_t.size() == phase.gamma_x.size() ? sobolev_norm(grid, phase.gamma_t, s) : 0.0;
  return std::hypot(a, b);
}

std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  require(n == y.size(), ErrorKind::InvalidField, "time_derivative: size mismatch");
  require(n >= 5, ErrorKind::Resolution, "need at least 5 snapshots to difference the energy");
  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    require(std::abs(t[i] - t[i - 1] - h) <= 1e-6 * h, ErrorKind::Precondition,
            "time_derivative needs uniformly spaced snapshots");
  std::vector<double> d(n);
  const double s = 12.0 * h;
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (-y[i + 2] + 8 * y[i + 1] - 8 * y[i - 1] + y[i - 2]) / s;
  d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / s;
  d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / s;
  const std::size_t a = n - 1, b = n - 2;
  d[a] = (25 * y[a] - 48 * y[a - 1] + 36 * y[a - 2] - 16 * y[a - 3] + 3 * y[a - 4]) / s;
  d[b] = (3 * y[b + 1] + 10 * y[b] - 18 * y[b - 1] + 6 * y[b - 2] - y[b - 3]) / s;
  return d;
}

ResidualDecomposition residual_decomposition(const Trajectory& traj, const PeriodicWave& wave,
                                             DampingVariable variable, int j,
                                             const std::vector<PhaseField>& phases, double max_err) {
  require(variable != DampingVariable::Inverse, ErrorKind::Precondition,
          "residual decomposition is defined for the unmodulated and forward variables");
  require(j >= 1 && j <= 3, ErrorKind::Parameter, "residual decomposition order must lie in 1..3");
  const LleParams& p = traj.params;
  require(p.beta != 0.0, ErrorKind::Parameter, "energy needs beta != 0");
  const VariableSeries s = variable_series(traj, wave, variable, phases);
  const Grid& g = s.grid;
  const std::size_t n = s.times.size();
  const bool forward = variable == DampingVariable::Forward;
  const ComplexField phi_x = wave.profile(g, 1);

  ResidualDecomposition out;
  out.variable = variable;
  out.j = j;
  out.times = s.times;
  for (auto* v : {&out.energy, &out.r_analytic, &out.r1, &out.r2, &out.r3, &out.bound1_linear, &out.bound1_quadratic,
                  &out.bound2, &out.bound3})
    v->assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const ComplexField& u = s.u[i];
    const ComplexField& bg = s.background[i];
    const MMatrix m = m_matrix(bg);
    const double e = energy(g, u, &m, j, p.beta);
    const ComplexField lin = linear_apply(g, p, bg, u);
    const ComplexField g_psi = rhs(g, p, traj.states[i]);
    const ComplexField g_bg = forward ? rhs(g, p, bg) : ComplexField::Zero(u.size());
    const ComplexField nonlin = g_psi - g_bg - lin;

    out.energy[i] = e;
    out.r1[i] = energy_rate(g, u, lin, m, nullptr, j, p.beta) + 2.0 * e;
    out.r2[i] = energy_rate(g, u, nonlin, m, nullptr, j, p.beta);
    if (forward) {
      const PhaseField& ph = s.phases[i];
      const ComplexField phi_x_shift = compose_shift(g, phi_x, ph.gamma, ShiftDirection::Backward);
      const ComplexField drift = (phi_x_shift.array() * ph.gamma_t.array().cast<std::complex<double>>()).matrix();
      const MMatrix m_t = m_variation(bg, -drift);
      out.r3[i] = energy_rate(g, u, g_bg + drift, m, &m_t, j, p.beta);
      out.bound3[i] = phase_rate_norm(g, ph, j + 2) * w_inf_norm(g, bg, j + 3) * l2(g, deriv_or_self(g, u, j - 1));
    }
    out.r_analytic[i] = out.r1[i] + out.r2[i] + out.r3[i];

    const double u0 = l2(g, u);
    const double ul = l2(g, deriv_or_self(g, u, j - 1));
    const double uj = l2(g, derivative(g, u, j));
    out.bound1_linear[i] = ul + u0;
    out.bound1_quadratic[i] = (ul + u0) * (ul + u0);
    out.bound2[i] = uj * uj * (uj + u0);
  }

  const auto de = time_derivative(out.times, out.energy);
  out.r_measured.resize(n);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.r_measured[i] = de[i] + 2.0 * out.energy[i];
    diff = std::max(diff, std::abs(out.r_measured[i] - out.r_analytic[i]));
    scale = std::max(scale, std::abs(out.r_analytic[i]));
  }
  out.differencing_error = scale > 1e-14 ? diff / scale : 0.0;
  if (out.differencing_error > max_err)
    throw Error(ErrorKind::Resolution,
                "snapshot cadence too coarse: differenced dE/dt + 2E misses the analytic value by " +
                    std::to_string(out.differencing_error) + " (relative); save more often");

  auto ratio_max = [&](const std::vector<double>& r, const std::vector<double>& b) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (b[i] > 0.0) c = std::max(c, std::abs(r[i]) / b[i]);
    return c;
  };
  out.c1_linear = ratio_max(out.r1, out.bound1_linear);
  out.c1_quadratic = ratio_max(out.r1, out.bound1_quadratic);
  out.c2 = ratio_max(out.r2, out.bound2);
  out.c3 = forward ? ratio_max(out.r3, out.bound3) : 0.0;

  double r1_max = 0.0;
  for (double r : out.r1) r1_max = std::max(r1_max, std::abs(r));
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(out.r1[i]) > 1e-3 * r1_max && out.bound1_linear[i] > 0.0) {
      xs.push_back(std::log(out.bound1_linear[i]));
      ys.push_back(std::log(std::abs(out.r1[i])));
    }
  if (xs.size() >= 3) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.r1_scaling_slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.r1_scaling_slope = std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isnan(out.r1_scaling_slope)) out.r1_bound_match = "undetermined";
  else out.r1_bound_match = std::abs(out.r1_scaling_slope - 2.0) < std::abs(out.r1_scaling_slope - 1.0) ? "quadratic" : "linear";
  return out;
}

std::vector<double> default_theta_scan() {
  std::vector<double> t(25);
  for (int i = 0; i < 25; ++i) t[i] = 1e-3 * std::pow(4.0 / 1e-3, i / 24.0);
  return t;
}

DampingReport damping_report(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable,
                             const DampingOptions& options, const std::vector<PhaseField>& phases) {
  const int k = options.j_max;
  require(k >= 1 && k <= 3, ErrorKind::Parameter, "j_max must lie in 1..3");
  require(options.c_lo > 0.0 && options.c_hi > options.c_lo && options.c_points >= 2, ErrorKind::Parameter,
          "bad C scan");
  require(traj.size() >= 2, ErrorKind::Precondition, "damping report needs at least two snapshots");
  const VariableSeries s = variable_series(traj, wave, variable, phases);
  const Grid& g = s.grid;
  const std::size_t n = s.times.size();

  DampingReport r;
  r.variable = variable;
  r.j_max = k;
  r.times = s.times;
  r.noise_floor = std::pow(1e-10 * sobolev_norm(g, wave.profile(g), k), 2);
  r.lhs.resize(n);
  r.forcing.resize(n);
  if (variable == DampingVariable::Inverse) r.instantaneous.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexField& u = s.u[i];
    const double hk = sobolev_norm(g, u, k);
    const double u0 = l2(g, u);
    r.max_hk = std::max(r.max_hk, hk);
    if (variable == DampingVariable::Unmodulated) {
      const MMatrix m = m_matrix(s.background[i]);
      r.lhs[i] = energy(g, u, &m, k, traj.params.beta);
      r.forcing[i] = u0 * u0;
    } else {
      const double rate = phase_rate_norm(g, s.phases[i], k + 2);
      r.max_gamma_rate = std::max(r.max_gamma_rate, rate);
      r.lhs[i] = hk * hk;
      r.forcing[i] = u0 * u0 + rate * rate;
      if (variable == DampingVariable::Inverse) {
        const double gx = sobolev_norm(g, s.phases[i].gamma_x, k + 1);
        r.instantaneous[i] = gx * gx;
      }
    }
  }

  r.theta = options.theta_scan.empty() ? default_theta_scan() : options.theta_scan;
  std::sort(r.theta.begin(), r.theta.end());
  for (double th : r.theta) require(th > 0.0, ErrorKind::Parameter, "theta scan must be positive");
  const double lc_lo = std::log(options.c_lo), lc_hi = std::log(options.c_hi);
  for (double th : r.theta) {
    const double c = exact_c_min(r, th);
    r.c_min.push_back(c);
    double grid_c = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < options.c_points; ++i) {
      const double cand = std::exp(lc_lo + (lc_hi - lc_lo) * i / (options.c_points - 1));
      if (cand >= c) {
        grid_c = cand;
        break;
      }
    }
    r.c_grid.push_back(grid_c);
    r.feasible.push_back(!std::isnan(grid_c));
  }
  for (std::size_t i = 0; i < r.theta.size(); ++i)
    if (r.feasible[i]) {
      r.nonempty = true;
      r.best_theta = r.theta[i];
      r.best_c = r.c_grid[i];
    }
  if (r.nonempty) {
    const auto parts = rhs_parts(r, r.best_theta);
    r.slack.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.slack[i] = parts[i].initial + r.best_c * parts[i].scaled - r.lhs[i];
  }
  return r;
}

bool integral_form_holds(const DampingReport& r, double theta, double c) {
  const auto parts = rhs_parts(r, theta);
  double scale = 0.0;
  for (double x : r.lhs) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (r.lhs[i] > parts[i].initial + c * parts[i].scaled + std::max(1e-9 * scale, r.noise_floor)) return false;
  return true;
}

bool differential_form_holds(const DampingReport& r, double theta, double c) {
  const auto d = time_derivative(r.times, r.lhs);
  double scale = 0.0;
  for (double x : d) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < d.size(); ++i) {
    double rhs_i = -theta * r.lhs[i] + c * r.forcing[i];
    if (d[i] > rhs_i + 1e-9 * scale) return false;
  }
  return true;
}

EnergyLedger energy_ledger(const Trajectory& traj, const PeriodicWave& wave, DampingVariable variable, int j_max,
                           const std::vector<PhaseField>& phases) {
  require(j_max >= 1 && j_max <= 3, ErrorKind::Parameter, "j_max must lie in 1..3");
  const VariableSeries s = variable_series(traj, wave, variable, phases);
  const Grid& g = s.grid;
  const std::size_t n = s.times.size();
  EnergyLedger L;
  L.variable = variable;
  L.j_max = j_max;
  L.times = s.times;
  L.energies.assign(static_cast<std::size_t>(j_max), std::vector<double>(n));
  L.l2.resize(n);
  L.hk.resize(n);
  L.gamma_rate.assign(n, 0.0);
  std::vector<double> top(n), u2(n), dj2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MMatrix m = m_matrix(s.background[i]);
    for (int j = 1; j <= j_max; ++j)
      L.energies[static_cast<std::size_t>(j - 1)][i] = energy(g, s.u[i], &m, j, traj.params.beta);
    L.l2[i] = l2(g, s.u[i]);
    L.hk[i] = sobolev_norm(g, s.u[i], j_max);
    if (!s.phases.empty()) L.gamma_rate[i] = phase_rate_norm(g, s.phases[i], j_max + 2);
    u2[i] = L.l2[i] * L.l2[i];
    const double dj = l2(g, derivative(g, s.u[i], j_max));
    dj2[i] = dj * dj;
  }
  const auto& e = L.energies.back();
  for (std::size_t i = 0; i < n; ++i)
    if (u2[i] > 0.0) L.equivalence_c = std::max(L.equivalence_c, (0.5 * dj2[i] - e[i]) / u2[i]);
  for (std::size_t i = 0; i < n; ++i)
    if (u2[i] > 0.0)
      L.equivalence_c_prime = std::max(L.equivalence_c_prime, (e[i] + L.equivalence_c * u2[i] - 2.0 * dj2[i]) / u2[i]);
  if (variable != DampingVariable::Inverse && n >= 5) {
    const auto rd = residual_decomposition(traj, wave, variable, j_max, phases, kInf);
    for (std::size_t i = 0; i < n; ++i) {
      L.r1.push_back(std::abs(rd.r1[i]));
      L.r2.push_back(std::abs(rd.r2[i]));
      L.r3.push_back(std::abs(rd.r3[i]));
    }
  }
  return L;
}

namespace {
nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const DampingReport& r) {
  nlohmann::json j;
  j["variable"] = to_string(r.variable);
  j["j_max"] = r.j_max;
  j["nonempty"] = r.nonempty;
  j["best_theta"] = r.best_theta;
  j["best_c"] = r.best_c;
  j["max_hk"] = r.max_hk;
  j["max_gamma_rate"] = r.max_gamma_rate;
  j["noise_floor"] = r.noise_floor;
  nlohmann::json scan = nlohmann::json::array();
  for (std::size_t i = 0; i < r.theta.size(); ++i)
    scan.push_back({{"theta", r.theta[i]}, {"c_min", finite_or_null(r.c_min[i])},
                    {"c_grid", finite_or_null(r.c_grid[i])}, {"feasible", static_cast<bool>(r.feasible[i])}});
  j["scan"] = scan;
  double min_slack = kInf;
  for (double s : r.slack) min_slack = std::min(min_slack, s);
  j["min_slack"] = finite_or_null(min_slack);
  return j;
}

nlohmann::json to_json(const ResidualDecomposition& r) {
  return {{"variable", to_string(r.variable)},
          {"j", r.j},
          {"c1_linear", r.c1_linear},
          {"c1_quadratic", r.c1_quadratic},
          {"c2", r.c2},
          {"c3", r.c3},
          {"r1_scaling_slope", finite_or_null(r.r1_scaling_slope)},
          {"r1_bound_match", r.r1_bound_match},
          {"differencing_error", r.differencing_error}};
}

namespace {
std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::MissingArtifact, "cannot write " + path);
  f.precision(12);
  return f;
}
}  // namespace

void write_slack_csv(const DampingReport& r, const std::string& path) {
  auto f = open_csv(path);
  f << "time,lhs,forcing,instantaneous,slack\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    f << r.times[i] << ',' << r.lhs[i] << ',' << r.forcing[i] << ','
      << (r.instantaneous.empty() ? 0.0 : r.instantaneous[i]) << ',' << (r.slack.empty() ? 0.0 : r.slack[i])
      << '\n';
}

void write_ledger_csv(const EnergyLedger& L, const std::string& path) {
  auto f = open_csv(path);
  f << "time";
  for (int j = 1; j <= L.j_max; ++j) f << ",E" << j;
  f << ",l2,hk,gamma_rate,r1,r2,r3\n";
  for (std::size_t i = 0; i < L.times.size(); ++i) {
    f << L.times[i];
    for (const auto& e : L.energies) f << ',' << e[i];
    f << ',' << L.l2[i] << ',' << L.hk[i] << ',' << L.gamma_rate[i];
    for (const auto* v : {&L.r1, &L.r2, &L.r3}) f << ',' << (v->empty() ? 0.0 : (*v)[i]);
    f << '\n';
  }
}

void write_residual_csv(const ResidualDecomposition& r, const std::string& path) {
  auto f = open_csv(path);
  f << "time,energy,r_measured,r_analytic,r1,r2,r3,bound1_linear,bound1_quadratic,bound2,bound3\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    f << r.times[i] << ',' << r.energy[i] << ',' << r.r_measured[i] << ',' << r.r_analytic[i] << ',' << r.r1[i]
      << ',' << r.r2[i] << ',' << r.r3[i] << ',' << r.bound1_linear[i] << ',' << r.bound1_quadratic[i] << ','
      << r.bound2[i] << ',' << r.bound3[i] << '\n';
}

}  // namespace lle
