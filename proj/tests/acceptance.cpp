// Runs the full pipeline on the shipped config, then re-derives every acceptance verdict from the
// written artifacts with independent arithmetic and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lle/config.hpp"
#include "lle/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("missing artifact " + p.string());
  return json::parse(f);
}

// Columns of a headed CSV keyed by header name.
std::map<std::string, std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("missing artifact " + p.string());
  std::string line;
  std::getline(f, line);
  std::vector<std::string> names;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) names.push_back(cell);
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    std::size_t i = 0;
    for (std::string cell; std::getline(ls, cell, ',') && i < names.size(); ++i)
      cols[names[i]].push_back(cell == "inf" ? kInf : std::stod(cell));
  }
  return cols;
}

struct Series {
  std::vector<double> t, v;
};

Series plot_series(const fs::path& run_dir, const std::string& run, const std::string& name) {
  auto cols = read_csv(run_dir / "plots" / run / (name + ".csv"));
  return {cols["t"], cols[name]};
}

// Least-squares slope of log v against log(1 + t) over [t_lo, t_hi].
double slope(const Series& s, double t_lo, double t_hi) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t_lo || s.t[i] > t_hi) continue;
    if (!(s.v[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log1p(s.t[i]), y = std::log(s.v[i]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double value_at(const Series& s, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.t.size(); ++i)
    if (std::abs(s.t[i] - t) < std::abs(s.t[best] - t)) best = i;
  return s.v[best];
}

// Steady residual of the wave in wave.json by direct trigonometric sums, with the cubic projected
// onto |j| < M/3 as in the evolution equation.
double wave_residual(const json& w) {
  const auto flat = w.at("coefficients").get<std::vector<double>>();
  const auto m = static_cast<long>(flat.size() / 2);
  const double k = w.at("k").get<double>();
  const double alpha = w.at("params").at("alpha").get<double>();
  const double beta = w.at("params").at("beta").get<double>();
  const double f = w.at("params").at("f_pump").get<double>();
  auto mode = [m](long j) { return j <= m / 2 ? j : j - m; };
  const double two_pi = 2 * std::numbers::pi;
  std::vector<cplx> phi(m), phixx(m), cubic(m), projected(m, 0.0);
  for (long n = 0; n < m; ++n) {
    for (long j = 0; j < m; ++j) {
      const cplx c(flat[2 * j], flat[2 * j + 1]);
      const cplx e = std::polar(1.0, two_pi * mode(j) * n / m);
      const double q = two_pi * k * mode(j);
      phi[n] += c * e;
      phixx[n] -= q * q * c * e;
    }
    cubic[n] = std::norm(phi[n]) * phi[n];
  }
  for (long j = 0; j < m; ++j) {
    if (3 * std::abs(mode(j)) >= m) continue;
    cplx c = 0;
    for (long n = 0; n < m; ++n) c += cubic[n] * std::polar(1.0, -two_pi * mode(j) * n / m);
    c /= static_cast<double>(m);
    for (long n = 0; n < m; ++n) projected[n] += c * std::polar(1.0, two_pi * mode(j) * n / m);
  }
  const cplx i(0, 1);
  double sum = 0;
  for (long n = 0; n < m; ++n) {
    const cplx r = -i * beta * phixx[n] - (1.0 + i * alpha) * phi[n] + i * projected[n] + f;
    sum += std::norm(r);
  }
  return std::sqrt(sum / (k * static_cast<double>(m)));
}

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << x;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: full pipeline plus independent re-checks of criteria 1-10"};
  std::string config_path = LLE_SOURCE_DIR "/configs/stable.json";
  std::string out = "acceptance_run";
  std::string unit_binary = LLE_UNIT_TESTS;
  bool reuse = false;
  app.add_option("-c,--config", config_path, "config file");
  app.add_option("-o,--out", out, "artifact directory");
  app.add_option("--unit-tests", unit_binary, "property-suite binary for criterion 10");
  app.add_flag("--reuse", reuse, "check an existing artifact directory instead of running the pipeline");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir = fs::absolute(out);
  if (!reuse) {
    fs::remove_all(dir);
    const lle::ExperimentConfig config = lle::load_config(config_path);
    std::cout << "running full pipeline into " << dir.string() << " ..." << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    const lle::ScenarioResult r = lle::run_scenario(config, lle::Scenario::FullPipeline, dir.string());
    std::cout << "pipeline finished in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s, exit "
              << r.exit_code << std::endl;
  }

  std::vector<Line> lines;
  auto guarded = [&](int id, auto&& check) {
    try {
      lines.push_back(check());
    } catch (const std::exception& e) {
      lines.push_back({id, false, std::string("could not check: ") + e.what()});
    }
  };
  const json summary = [&] {
    try {
      return read_json(dir / "summary.json");
    } catch (const std::exception&) {
      return json::object();
    }
  }();
  auto crit = [&](const char* id) { return summary.at("criteria").at(id); };

  guarded(1, [&] {
    const json w = read_json(dir / "wave.json");
    const double res = wave_residual(w);
    const int iters = w.at("iterations").get<int>();
    const double secs = crit("1").at("seconds").get<double>();
    return Line{1, res < 1e-10 && iters <= 15 && secs < 10.0,
                "residual " + fmt(res) + ", Newton iterations " + std::to_string(iters) + ", " + fmt(secs) + " s"};
  });

  guarded(2, [&] {
    const json s = read_json(dir / "spectrum.json");
    auto cols = read_csv(dir / "spectrum.csv");
    double max_re = -kInf, lambda0 = kInf;
    std::size_t n_xi = 0;
    double last_xi = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < cols["xi"].size(); ++i) {
      const double xi = cols["xi"][i];
      if (xi != last_xi) ++n_xi;
      last_xi = xi;
      if (std::abs(xi) > 1e-14) max_re = std::max(max_re, cols["re"][i]);
      else if (cols["critical"][i] == 1.0) lambda0 = std::abs(cplx(cols["re"][i], cols["im"][i]));
    }
    const double d = s.at("curvature_d").get<double>();
    const double fit = s.at("fit_relative_residual").get<double>();
    const double secs = s.at("seconds").get<double>();
    return Line{2, max_re < 0 && lambda0 <= 1e-8 && d > 0 && fit < 1e-2 && secs < 120.0 && n_xi >= 128,
                "max Re lambda (xi != 0) " + fmt(max_re) + ", |lambda_c(0)| " + fmt(lambda0) + ", d " + fmt(d) +
                    ", fit residual " + fmt(fit) + ", " + std::to_string(n_xi) + " xi, " + fmt(secs) + " s"};
  });

  guarded(3, [&] {
    const json j = read_json(dir / "linear_rate.json");
    const double measured = j.at("measured_ratio").get<double>();
    const double predicted = std::exp(j.at("t").get<double>() * j.at("lambda_re").get<double>());
    const double rel = std::abs(measured / predicted - 1.0);
    return Line{3, rel < 1e-2 && j.at("lambda_re").get<double>() < 0 && j.at("t").get<double>() == 5.0,
                "measured/predicted - 1 = " + fmt(rel) + " at t = 5"};
  });

  guarded(4, [&] {
    const json e = read_json(dir / "equivalence.json");
    auto cols = read_csv(dir / "equivalence_lp.csv");
    double min_slack = kInf, max_gx = 0, flagged = 0;
    for (std::size_t i = 0; i < cols["sample"].size(); ++i) {
      for (const char* c : {"slack_upper_inverse", "slack_upper_shifted", "slack_lower_inverse", "slack_lower_shifted"})
        min_slack = std::min(min_slack, cols[c][i]);
      max_gx = std::max(max_gx, cols["sup_gamma_x"][i]);
      flagged += cols["violation"][i];
    }
    const double samples = cols["sample"].empty() ? 0 : cols["sample"].back() + 1;
    const double c0 = e.at("max_hk_constant").get<double>(), c1 = e.at("max_hk_constant_refined").get<double>();
    const bool pass = samples == 1000 && min_slack >= -1e-8 && flagged == 0 && max_gx <= 0.5 &&
                      e.at("violations_refined").get<int>() == 0 && std::isfinite(c0) && std::isfinite(c1) &&
                      c1 / c0 < 2.0 && c1 / c0 > 0.5 && e.at("seconds").get<double>() < 300.0;
    return Line{4, pass,
                fmt(samples) + " samples, min slack " + fmt(min_slack) + ", max |gamma_x| " + fmt(max_gx) +
                    ", H^2 constant " + fmt(c0) + " -> " + fmt(c1) + " on the doubled grid, " +
                    fmt(e.at("seconds").get<double>()) + " s"};
  });

  guarded(5, [&] {
    const double rt = read_json(dir / "equivalence.json").at("max_roundtrip").get<double>();
    return Line{5, rt < 1e-9, "max round-trip defect " + fmt(rt)};
  });

  guarded(6, [&] {
    const json d = read_json(dir / "damping.json");
    std::map<std::pair<std::string, int>, double> best;
    bool all = true;
    for (const auto& r : d.at("runs")) {
      all = all && r.at("nonempty").get<bool>() && r.at("best_theta").get<double>() > 0;
      best[{r.at("variable").get<std::string>(), r.at("refine").get<int>()}] = r.at("best_theta").get<double>();
    }
    double worst = 0;
    std::size_t pairs = 0;
    std::string thetas;
    for (const char* v : {"unmodulated", "forward", "inverse"}) {
      const auto a = best.find({v, 1}), b = best.find({v, 2});
      if (a == best.end() || b == best.end()) continue;
      ++pairs;
      worst = std::max(worst, std::abs(b->second / a->second - 1.0));
      thetas += std::string(thetas.empty() ? "" : ", ") + v + " " + fmt(a->second);
    }
    return Line{6, all && pairs == 3 && worst <= 0.2,
                "best theta " + thetas + "; max change under grid doubling " + fmt(worst)};
  });

  guarded(7, [&] {
    const double v = slope(plot_series(dir, "localized", "v_l2"), 10, 1000);
    const double vt = slope(plot_series(dir, "localized", "vtilde_l2"), 10, 1000);
    const double secs = read_json(dir / "asymptotics_localized.json").at("seconds").get<double>();
    return Line{7, std::abs(v + 0.75) <= 0.15 && std::abs(vt + 0.25) <= 0.15 && secs <= 1800.0,
                "||v|| exponent " + fmt(v) + ", ||v~|| exponent " + fmt(vt) + ", " + fmt(secs) + " s"};
  });

  guarded(8, [&] {
    const double v = slope(plot_series(dir, "nonlocalized", "v_l2"), 10, 1000);
    const Series g = plot_series(dir, "nonlocalized", "gamma_linf");
    double gmax = 0;
    for (double x : g.v) gmax = std::max(gmax, x);
    const double e0 = read_json(dir / "asymptotics_nonlocalized.json").at("e0").get<double>();
    const double t = read_json(dir / "contrast.json").at("compare_time").get<double>();
    const double small = value_at(plot_series(dir, "nonlocalized", "gamma_l2"), t);
    const double large = value_at(plot_series(dir, "nonlocalized_large", "gamma_l2"), t);
    const double growth = large / small;
    return Line{8, std::abs(v + 0.25) <= 0.15 && gmax <= 2 * e0 && std::abs(growth - 1.4) <= 0.15,
                "||v|| exponent " + fmt(v) + ", sup ||gamma||_inf " + fmt(gmax) + " vs 2 E0 = " + fmt(2 * e0) +
                    ", ||gamma||_2 growth " + fmt(growth) + " at t = " + fmt(t)};
  });

  guarded(9, [&] {
    const double pd = slope(plot_series(dir, "nonlocalized", "phase_diff_linf"), 10, 1000);
    const double kd = slope(plot_series(dir, "nonlocalized", "k_diff_l2"), 10, 1000);
    const double kn = slope(plot_series(dir, "nonlocalized", "k_l2"), 10, 1000);
    return Line{9, pd <= 0.1 && kn - kd >= 0.35,
                "||gamma - h||_inf exponent " + fmt(pd) + ", k gap " + fmt(kn - kd) + " (" + fmt(kd) + " vs " +
                    fmt(kn) + ")"};
  });

  guarded(10, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = "\"" + unit_binary + "\" > \"" + (dir / "property_suites.log").string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Line{10, rc == 0 && secs < 300.0, "unit suites exit " + std::to_string(rc) + ", " + fmt(secs) + " s"};
  });

  bool all = true;
  for (const auto& l : lines) {
    std::cout << "criterion " << l.id << ": " << (l.pass ? "PASS" : "FAIL") << "  (" << l.detail << ")\n";
    all = all && l.pass;
  }
  std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? 0 : 1;
}
