#include "lle/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>

#include "lle/error.hpp"
#include "lle/fft.hpp"

namespace lle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInfNorm = std::numeric_limits<double>::infinity();

RealField phase_from_k(const Grid& grid, const RealField& k, double k_star, double h_mean) {
  double mean = 0.0;
  RealField h = spectral::antiderivative(RealField(k / k_star), grid.length(), &mean);
  // Zero mode of k/k_star as a ramp centred so that the ramp itself has zero mean on the grid.
  const double centre = grid.length() * 0.5 - grid.spacing() * 0.5;
  for (Eigen::Index i = 0; i < h.size(); ++i) h[i] += mean * (grid.x(static_cast<std::size_t>(i)) - centre);
  h.array() += h_mean - h.mean();
  return h;
}

}  // namespace

WhithamRun solve_heat(const Grid& grid, const RealField& k0, double diffusion, const std::vector<double>& times,
                      double k_star, double h_mean) {
  require(diffusion > 0.0, ErrorKind::Precondition, "heat flow needs a positive diffusion coefficient");
  require(k_star > 0.0, ErrorKind::Parameter, "k_star must be positive");
  check_on_grid(grid, k0.size(), "solve_heat");
  check_finite(k0, "solve_heat");
  WhithamRun run{grid, k_star, diffusion, k0, times, {}, {}};
  const ComplexField c0 = fft(ComplexField(k0.cast<std::complex<double>>()));
  const RealField& xi = grid.wavenumbers();
  for (double t : times) {
    require(t >= 0.0, ErrorKind::Parameter, "heat flow times must be non-negative");
    ComplexField c = c0;
    c.array() *= (-diffusion * t * xi.array().square()).exp().cast<std::complex<double>>();
    RealField k = ifft(c).real();
    run.h.push_back(phase_from_k(grid, k, k_star, h_mean));
    run.k.push_back(std::move(k));
  }
  return run;
}

WhithamRun solve_heat_from_phase(const Grid& grid, const RealField& h0, double diffusion,
                                 const std::vector<double>& times, double k_star) {
  check_on_grid(grid, h0.size(), "solve_heat_from_phase");
  const RealField k0 = k_star * derivative(grid, h0, 1);
  return solve_heat(grid, k0, diffusion, times, k_star, h0.mean());
}

std::string DecayFit::verdict() const {
  if (samples == 0) return "no-fit";
  if (std::isnan(predicted)) return "reported";
  return pass ? "pass" : "fail";
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_min, double t_max,
                   std::string name) {
  require(times.size() == values.size(), ErrorKind::InvalidField, "fit_decay: size mismatch");
  std::vector<double> xs, ys;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min || times[i] > t_max) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw Error(ErrorKind::Fit, "fit_decay(" + name + "): non-positive value at t = " + std::to_string(times[i]));
    xs.push_back(std::log1p(times[i]));
    ys.push_back(std::log(values[i]));
    lo = std::min(lo, times[i]);
    hi = std::max(hi, times[i]);
  }
  if (xs.size() < 3 || (1.0 + hi) < 10.0 * (1.0 + lo) * (1.0 - 1e-9))
    throw Error(ErrorKind::Fit, "fit_decay(" + name + "): fewer than one decade of times beyond t_min");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DecayFit f;
  f.name = std::move(name);
  f.t_min = lo;
  f.t_max = hi;
  f.samples = xs.size();
  f.exponent = sxy / sxx;
  const double icpt = my - f.exponent * mx;
  f.prefactor = std::exp(icpt);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - icpt - f.exponent * xs[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.std_error = xs.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return f;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_min, double t_max,
                   std::string name, double predicted, double tolerance, FitMode mode) {
  DecayFit f = fit_decay(times, values, t_min, t_max, std::move(name));
  f.predicted = predicted;
  f.tolerance = tolerance;
  f.mode = mode;
  f.pass = mode == FitMode::Within ? std::abs(f.exponent - predicted) <= tolerance
                                   : f.exponent <= predicted + tolerance;
  return f;
}

const NormSeries& AsymptoticsReport::find(const std::string& name) const {
  for (const auto& s : series)
    if (s.name == name) return s;
  throw Error(ErrorKind::MissingArtifact, "no norm series named " + name);
}

const DecayFit& AsymptoticsReport::fit(const std::string& name) const {
  for (const auto& f : fits)
    if (f.name == name) return f;
  throw Error(ErrorKind::MissingArtifact, "no decay fit named " + name);
}

double AsymptoticsReport::at(const std::string& name, double t) const {
  require(!times.empty(), ErrorKind::MissingArtifact, "empty asymptotics report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  return find(name).values[best];
}

AsymptoticsReport compare_asymptotics(const Trajectory& traj, const std::vector<PhaseField>& phases,
                                      const PeriodicWave& wave, const WhithamRun& run,
                                      const AsymptoticsOptions& opts) {
  const std::size_t n_t = traj.size();
  require(phases.size() == n_t, ErrorKind::Precondition, "compare_asymptotics needs one phase per snapshot");
  require(run.times.size() == n_t, ErrorKind::Precondition, "heat run and trajectory have different time grids");
  for (std::size_t i = 0; i < n_t; ++i)
    require(std::abs(run.times[i] - traj.times[i]) <= 1e-9 * std::max(1.0, traj.times[i]), ErrorKind::Precondition,
            "heat run and trajectory have different time grids");
  require(run.grid == traj.grid, ErrorKind::Precondition, "heat run and trajectory use different grids");
  const Grid& g = traj.grid;
  const double ks = wave.k();
  const ComplexField phi = wave.profile(g);

  double gx_max = 0.0;
  for (const auto& ph : phases) gx_max = std::max(gx_max, ph.gamma_x.cwiseAbs().maxCoeff());
  std::optional<WaveFamily> family;
  if (gx_max > 1e-12) {
    const double span = opts.family_margin * gx_max;
    require(span < 1.0, ErrorKind::Extrapolation, "phase gradient too large for a wave family");
    family = build_family(wave, ks * (1.0 - span), ks * (1.0 + span), std::max(opts.family_size, 4));
  }

  AsymptoticsReport rep;
  rep.k_star = ks;
  rep.params = traj.params;
  rep.length = g.length();
  rep.times = traj.times;
  const std::vector<std::pair<std::string, double>> names = {
      {"profile_diff_l2", 2.0}, {"profile_diff_linf", kInfNorm}, {"k_diff_l2", 2.0}, {"k_diff_linf", kInfNorm},
      {"phase_diff_l2", 2.0},   {"phase_diff_linf", kInfNorm},   {"k_l2", 2.0},      {"k_linf", kInfNorm},
      {"h_linf", kInfNorm},     {"v_l2", 2.0},                   {"vtilde_l2", 2.0}, {"gamma_l2", 2.0},
      {"gamma_linf", kInfNorm}, {"gamma_x_l2", 2.0}};
  for (const auto& [name, p] : names) rep.series.push_back({name, p, std::vector<double>(n_t)});
  auto put = [&](std::size_t s, std::size_t i, double v) { rep.series[s].values[i] = v; };

  ComplexField profile(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < n_t; ++i) {
    const ComplexField& psi = traj.states[i];
    const PhaseField& ph = phases[i];
    const ComplexField pulled = compose_shift(g, psi, ph.gamma, ShiftDirection::Forward);
    if (family) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        profile[jj] = family->value(ks * (1.0 - ph.gamma_x[jj]), ks * g.x(j));
      }
    } else {
      profile = phi;
    }
    const ComplexField d1 = pulled - profile;
    const RealField d2 = RealField(-ks * ph.gamma_x) - run.k[i];
    const RealField d3 = RealField(-ph.gamma) - run.h[i];
    put(0, i, lp_norm(g, d1, 2.0));
    put(1, i, lp_norm(g, d1, kInfNorm));
    put(2, i, lp_norm(g, d2, 2.0));
    put(3, i, lp_norm(g, d2, kInfNorm));
    put(4, i, lp_norm(g, d3, 2.0));
    put(5, i, lp_norm(g, d3, kInfNorm));
    put(6, i, lp_norm(g, run.k[i], 2.0));
    put(7, i, lp_norm(g, run.k[i], kInfNorm));
    put(8, i, lp_norm(g, run.h[i], kInfNorm));
    put(9, i, lp_norm(g, ComplexField(pulled - phi), 2.0));
    put(10, i, lp_norm(g, ComplexField(psi - phi), 2.0));
    put(11, i, lp_norm(g, ph.gamma, 2.0));
    put(12, i, lp_norm(g, ph.gamma, kInfNorm));
    put(13, i, lp_norm(g, ph.gamma_x, 2.0));
  }
  return rep;
}

void fit_report(AsymptoticsReport& rep, const AsymptoticsOptions& opts, bool localized) {
  const double eta = opts.eta, tol = opts.tolerance;
  auto heat = [](double p) { return p == 2.0 ? -0.25 : 0.0; };  // -(1/2)(1 - 1/p)
  struct Target {
    std::string name;
    double predicted;
    double tol;
    FitMode mode;
  };
  std::vector<Target> targets = {
      {"profile_diff_l2", -0.75, tol, FitMode::AtMost},
      {"profile_diff_linf", -0.75, tol, FitMode::AtMost},
      {"k_diff_l2", heat(2.0) - 0.5, eta, FitMode::AtMost},
      {"k_diff_linf", heat(kInfNorm) - 0.5, eta, FitMode::AtMost},
      {"phase_diff_l2", heat(2.0), eta, FitMode::AtMost},
      {"phase_diff_linf", heat(kInfNorm), eta, FitMode::AtMost},
      {"k_l2", kNaN, tol, FitMode::Within},
      {"k_linf", kNaN, tol, FitMode::Within},
      {"h_linf", kNaN, tol, FitMode::Within},
  };
  if (localized) {
    targets.push_back({"v_l2", -0.75, tol, FitMode::Within});
    targets.push_back({"vtilde_l2", -0.25, tol, FitMode::Within});
    targets.push_back({"gamma_l2", -0.25, tol, FitMode::Within});
    targets.push_back({"gamma_linf", -0.5, tol, FitMode::Within});
    targets.push_back({"gamma_x_l2", -0.75, tol, FitMode::Within});
  } else {
    targets.push_back({"v_l2", -0.25, tol, FitMode::Within});
    targets.push_back({"vtilde_l2", kNaN, tol, FitMode::Within});
    targets.push_back({"gamma_l2", kNaN, tol, FitMode::Within});
    targets.push_back({"gamma_linf", kNaN, tol, FitMode::Within});
    targets.push_back({"gamma_x_l2", -0.25, tol, FitMode::Within});
  }
  rep.fits.clear();
  for (const auto& t : targets) {
    try {
      if (std::isnan(t.predicted)) rep.fits.push_back(fit_decay(rep.times, rep.find(t.name).values, opts.t_min, opts.t_max, t.name));
      else
        rep.fits.push_back(fit_decay(rep.times, rep.find(t.name).values, opts.t_min, opts.t_max, t.name, t.predicted,
                                     t.tol, t.mode));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Fit) throw;
      DecayFit f;
      f.name = t.name;
      f.samples = 0;
      f.exponent = kNaN;
      f.predicted = t.predicted;
      f.pass = false;
      rep.fits.push_back(f);
    }
  }
}

ContrastReport localized_vs_nonlocalized(const AsymptoticsReport& loc, const AsymptoticsReport& nonloc,
                                         const AsymptoticsReport* large, double compare_time) {
  auto same_wave = [](const AsymptoticsReport& a, const AsymptoticsReport& b) {
    return std::abs(a.k_star - b.k_star) <= 1e-12 * a.k_star && a.params.alpha == b.params.alpha &&
           a.params.beta == b.params.beta && a.params.f_pump == b.params.f_pump;
  };
  require(same_wave(loc, nonloc) && (!large || same_wave(loc, *large)), ErrorKind::Configuration,
          "localized and nonlocalized runs use different waves");
  ContrastReport c;
  for (const char* name : {"v_l2", "gamma_x_l2", "gamma_l2", "gamma_linf"}) {
    auto exponent = [&](const AsymptoticsReport& r) {
      for (const auto& f : r.fits)
        if (f.name == name) return f.exponent;
      return kNaN;
    };
    c.rows.push_back({name, exponent(loc), exponent(nonloc)});
  }
  if (large) {
    c.compare_time = std::isnan(compare_time) ? std::min(nonloc.times.back(), large->times.back()) : compare_time;
    c.gamma_l2_small = nonloc.at("gamma_l2", c.compare_time);
    c.gamma_l2_large = large->at("gamma_l2", c.compare_time);
    c.length_ratio = large->length / nonloc.length;
    c.gamma_l2_growth = c.gamma_l2_large / c.gamma_l2_small;
    // A norm that stays bounded as L grows would give growth ~ 1; sqrt(L) growth marks divergence.
    c.domain_divergent = c.gamma_l2_growth > std::pow(c.length_ratio, 0.25);
  }
  return c;
}

nlohmann::json to_json(const DecayFit& f) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  return {{"name", f.name},          {"t_min", f.t_min},
          {"t_max", f.t_max},        {"samples", f.samples},
          {"exponent", num(f.exponent)}, {"std_error", f.std_error},
          {"residual", f.residual},  {"predicted", num(f.predicted)},
          {"tolerance", f.tolerance}, {"mode", f.mode == FitMode::Within ? "within" : "at-most"},
          {"verdict", f.verdict()}};
}

nlohmann::json to_json(const AsymptoticsReport& r) {
  nlohmann::json j;
  j["k_star"] = r.k_star;
  j["length"] = r.length;
  j["fits"] = nlohmann::json::array();
  for (const auto& f : r.fits) j["fits"].push_back(to_json(f));
  return j;
}

nlohmann::json to_json(const ContrastReport& c) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  for (const auto& r : c.rows) j["rows"].push_back({{"norm", r.norm}, {"localized", num(r.localized)}, {"nonlocalized", num(r.nonlocalized)}});
  j["compare_time"] = c.compare_time;
  j["gamma_l2_small"] = c.gamma_l2_small;
  j["gamma_l2_large"] = c.gamma_l2_large;
  j["length_ratio"] = c.length_ratio;
  j["gamma_l2_growth"] = c.gamma_l2_growth;
  j["domain_divergent"] = c.domain_divergent;
  return j;
}

void write_plot_data(const AsymptoticsReport& r, const std::string& directory) {
  std::filesystem::create_directories(directory);
  for (const auto& s : r.series) {
    std::ofstream a(directory + "/" + s.name + ".csv"), b(directory + "/" + s.name + "_loglog.csv");
    require(a && b, ErrorKind::MissingArtifact, "cannot write plot data in " + directory);
    a.precision(12);
    b.precision(12);
    a << "t," << s.name << '\n';
    b << "log1p_t,log_" << s.name << '\n';
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      a << r.times[i] << ',' << s.values[i] << '\n';
      if (s.values[i] > 0.0) b << std::log1p(r.times[i]) << ',' << std::log(s.values[i]) << '\n';
    }
  }
}

void write_whitham_csv(const WhithamRun& run, const std::string& path) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::MissingArtifact, "cannot write " + path);
  f.precision(12);
  f << "time,k_l2,k_linf,h_linf,k_mass\n";
  for (std::size_t i = 0; i < run.times.size(); ++i)
    f << run.times[i] << ',' << lp_norm(run.grid, run.k[i], 2.0) << ',' << lp_norm(run.grid, run.k[i], kInfNorm) << ','
      << lp_norm(run.grid, run.h[i], kInfNorm) << ',' << run.k[i].sum() * run.grid.spacing() << '\n';
}

}  // namespace lle
