#include "lle/evolution.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "lle/fft.hpp"
#include "lle/version.hpp"

namespace lle {

namespace fs = std::filesystem;

namespace {

constexpr std::complex<double> kI(0.0, 1.0);
constexpr int kContourPoints = 64;

}  // namespace

Stepper::Stepper(const Grid& grid, const LleParams& params, double dt, bool linearized, ComplexField background)
    : grid_(grid), params_(params), dt_(dt), linearized_(linearized), background_(std::move(background)) {
  params_.validate();
  require(std::isfinite(dt) && dt > 0, ErrorKind::Parameter, "time step must be positive");
  if (linearized_) {
    check_on_grid(grid_, background_.size(), "background wave");
    background_intensity_ = background_.cwiseAbs2();
    background_square_ = background_.array().square();
  }
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  mask_ = spectral::dealias_mask(grid.size());
  const RealField& q = grid.wavenumbers();
  e_.resize(n);
  e2_.resize(n);
  q_.resize(n);
  f1_.resize(n);
  f2_.resize(n);
  f3_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::complex<double> lin = kI * params_.beta * q[j] * q[j] - (1.0 + kI * params_.alpha);
    e_[j] = std::exp(dt * lin);
    e2_[j] = std::exp(0.5 * dt * lin);
    std::complex<double> sq = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int c = 1; c <= kContourPoints; ++c) {
      const std::complex<double> z =
          dt * lin + std::exp(kI * 2.0 * std::numbers::pi * (c - 0.5) / static_cast<double>(kContourPoints));
      const std::complex<double> ez = std::exp(z);
      const std::complex<double> z3 = z * z * z;
      sq += (std::exp(0.5 * z) - 1.0) / z;
      s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      s2 += (2.0 + z + ez * (-2.0 + z)) / z3;
      s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    const double scale = dt / kContourPoints;
    q_[j] = scale * sq;
    f1_[j] = scale * s1;
    f2_[j] = scale * s2;
    f3_[j] = scale * s3;
  }
}

ComplexField Stepper::stage(const ComplexField& coeffs) const {
  const ComplexField u = ifft(coeffs);
  ComplexField w(u.size());
  if (linearized_) {
    for (Eigen::Index i = 0; i < u.size(); ++i)
      w[i] = kI * (2.0 * background_intensity_[i] * u[i] + background_square_[i] * std::conj(u[i]));
  } else {
    for (Eigen::Index i = 0; i < u.size(); ++i) w[i] = kI * std::norm(u[i]) * u[i];
  }
  ComplexField out = fft(w);
  out.array() *= mask_;
  if (!linearized_) out[0] += params_.f_pump;
  return out;
}

void Stepper::advance(ComplexField& v) const {
  const ComplexField nv = stage(v);
  const ComplexField a = (e2_ * v.array() + q_ * nv.array()).matrix();
  const ComplexField na = stage(a);
  const ComplexField b = (e2_ * v.array() + q_ * na.array()).matrix();
  const ComplexField nb = stage(b);
  const ComplexField c = (e2_ * a.array() + q_ * (2.0 * nb.array() - nv.array())).matrix();
  const ComplexField nc = stage(c);
  v = (e_ * v.array() + f1_ * nv.array() + 2.0 * f2_ * (na.array() + nb.array()) + f3_ * nc.array()).matrix();
}

ComplexField Stepper::step(const ComplexField& values) const {
  check_on_grid(grid_, values.size(), "state");
  ComplexField c = fft(values);
  advance(c);
  return ifft(c);
}

FieldState step(const FieldState& state, double dt, const LleParams& params) {
  check_finite(state.psi, "state");
  const Stepper stepper(state.grid, params, dt);
  FieldState out{state.grid, state.time + dt, stepper.step(state.psi)};
  require(out.psi.allFinite(), ErrorKind::BlowUp,
          "state became non-finite at t = " + std::to_string(out.time) + ", max modulus before step " +
              std::to_string(state.psi.cwiseAbs().maxCoeff()));
  return out;
}

void Trajectory::append(double t, ComplexField psi) {
  require(times.empty() || t > times.back(), ErrorKind::InvalidField, "trajectory times must increase");
  check_on_grid(grid, psi.size(), "trajectory state");
  check_finite(psi, "trajectory state");
  times.push_back(t);
  states.push_back(std::move(psi));
}

Trajectory evolve(const FieldState& initial, const LleParams& params, const EvolveOptions& options,
                  const std::optional<PeriodicWave>& wave) {
  require(options.t_final > 0 && options.save_every >= 1, ErrorKind::Parameter,
          "evolve needs t_final > 0 and save_every >= 1");
  check_on_grid(initial.grid, initial.psi.size(), "initial state");
  check_finite(initial.psi, "initial state");
  const auto n_steps = static_cast<long>(std::llround(options.t_final / options.dt));
  require(n_steps >= 1 && std::abs(n_steps * options.dt - options.t_final) < 1e-9 * options.t_final,
          ErrorKind::Parameter, "t_final must be a multiple of dt");
  ComplexField background;
  if (options.linearized) {
    require(wave.has_value(), ErrorKind::Precondition, "linearized evolution needs the background wave");
    background = wave->profile(initial.grid);
  }
  const Stepper stepper(initial.grid, params, options.dt, options.linearized, background);

  Trajectory traj{initial.grid, params, wave, options.linearized, options.dt, options.save_every, {}, {}};
  traj.append(initial.time, initial.psi);
  ComplexField coeffs = fft(options.linearized ? ComplexField(initial.psi - background) : initial.psi);
  for (long s = 1; s <= n_steps; ++s) {
    stepper.advance(coeffs);
    const bool save = s % options.save_every == 0;
    if (save || s % 64 == 0) {
      if (!coeffs.allFinite()) {
        const double t = initial.time + s * options.dt;
        const double last_max = traj.states.back().cwiseAbs().maxCoeff();
        throw BlowUpError("state became non-finite by t = " + std::to_string(t) +
                              " (max modulus at last save " + std::to_string(last_max) + ")",
                          traj);
      }
    }
    if (save) {
      ComplexField values = ifft(coeffs);
      if (options.linearized) values += background;
      traj.append(initial.time + s * options.dt, std::move(values));
    }
  }
  return traj;
}

const char* to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::Localized: return "localized";
    case PerturbationKind::NonlocalizedPhase: return "nonlocalized-phase";
    case PerturbationKind::RandomLocalized: return "random-localized";
  }
  return "unknown";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  if (s == "localized") return PerturbationKind::Localized;
  if (s == "nonlocalized-phase") return PerturbationKind::NonlocalizedPhase;
  if (s == "random-localized") return PerturbationKind::RandomLocalized;
  throw Error(ErrorKind::Configuration, "unknown perturbation kind '" + s + "'");
}

RealField smoothed_double_step(const Grid& grid, double c, double width) {
  const double l = grid.length();
  RealField h(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    h[static_cast<Eigen::Index>(i)] = c * (std::tanh((x - 0.25 * l) / width) - std::tanh((x - 0.75 * l) / width)) - c;
  }
  return h;
}

Perturbation make_perturbation(const PerturbationSpec& spec, const PeriodicWave& wave, const Grid& grid) {
  require(spec.width > 0, ErrorKind::Parameter, "perturbation width must be positive");
  const ComplexField phi = wave.profile(grid);
  const double sup = phi.cwiseAbs().maxCoeff();
  Perturbation out{FieldState{grid, 0.0, phi}, std::nullopt, 0.0};
  const double x0 = 0.5 * grid.length() + spec.center_offset;

  switch (spec.kind) {
    case PerturbationKind::Localized:
    case PerturbationKind::RandomLocalized: {
      require(spec.amplitude >= 0 && spec.amplitude <= 1e-2 * sup, ErrorKind::Precondition,
              "perturbation amplitude must lie in [0, 1e-2 * sup|phi|]");
      if (spec.amplitude == 0.0) return out;
      ComplexField bump(phi.size());
      if (spec.kind == PerturbationKind::Localized) {
        const std::complex<double> dir = spec.direction / std::abs(spec.direction);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double s = (grid.x(i) - x0) / spec.width;
          bump[static_cast<Eigen::Index>(i)] = dir * std::exp(-s * s);
        }
      } else {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> normal;
        const RealField& q = grid.wavenumbers();
        ComplexField c = ComplexField::Zero(phi.size());
        for (Eigen::Index j = 0; j < c.size(); ++j)
          if (std::abs(q[j]) <= 1.0 / spec.width) c[j] = {normal(rng), normal(rng)};
        const ComplexField noise = ifft(c);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double s = (grid.x(i) - x0) / (4.0 * spec.width);
          bump[static_cast<Eigen::Index>(i)] = noise[static_cast<Eigen::Index>(i)] * std::exp(-s * s);
        }
      }
      const double peak = bump.cwiseAbs().maxCoeff();
      out.state.psi += (spec.amplitude / peak) * bump;
      return out;
    }
    case PerturbationKind::NonlocalizedPhase: {
      const auto [lo, hi] = spec.h0_limits;
      require(std::isfinite(lo) && std::isfinite(hi), ErrorKind::Precondition, "h0 limits must be finite");
      out.applied_shift = 0.5 * (lo + hi);
      const double c = 0.5 * (hi - lo);
      const double phix_sup = wave.period_values(8 * wave.modes(), 1).cwiseAbs().maxCoeff();
      require(std::abs(c) * phix_sup <= 0.5 * sup, ErrorKind::Precondition,
              "phase step too large: |c| * sup|phi_x| must stay below sup|phi| / 2");
      RealField h0 = smoothed_double_step(grid, c, spec.width);
      if (c != 0.0) {
        const PeriodicInterpolant interp(phi, grid.length());
        out.state.psi = interp.at_shifted_grid(h0);
      }
      out.h0 = std::move(h0);
      return out;
    }
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'L', 'L', 'E', 'S', 'N', 'A', 'P', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  require(static_cast<bool>(in), ErrorKind::MissingArtifact, "truncated snapshot file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string snapshot_name(std::size_t i) {
  std::ostringstream s;
  s << "snapshots/snap_" << std::setw(6) << std::setfill('0') << i << ".bin";
  return s.str();
}

}  // namespace

void save_trajectory(const Trajectory& traj, const std::string& directory) {
  const fs::path dir(directory);
  fs::create_directories(dir / "snapshots");
  nlohmann::json meta = {{"format_version", kSnapshotVersion},
                         {"tool_version", kToolVersion},
                         {"n_points", traj.grid.size()},
                         {"length", traj.grid.length()},
                         {"params", traj.params},
                         {"linearized", traj.linearized},
                         {"dt", traj.dt},
                         {"save_every", traj.save_every},
                         {"snapshots", traj.size()}};
  if (traj.wave) meta["wave"] = wave_to_json(*traj.wave);
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';

  std::ofstream index(dir / "index.csv");
  require(static_cast<bool>(index), ErrorKind::Configuration, "cannot write trajectory index in " + directory);
  index << "time,file,l2,linf\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::string name = snapshot_name(i);
    std::ofstream out(dir / name, std::ios::binary);
    out.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(out, kSnapshotVersion);
    write_le<std::uint32_t>(out, 0);
    write_le<std::uint64_t>(out, traj.grid.size());
    write_le<double>(out, traj.times[i]);
    write_le<double>(out, traj.grid.length());
    for (const auto& z : traj.states[i]) {
      write_le<double>(out, z.real());
      write_le<double>(out, z.imag());
    }
    index << traj.times[i] << ',' << name << ',' << lp_norm(traj.grid, traj.states[i], 2.0) << ','
          << lp_norm(traj.grid, traj.states[i], INFINITY) << '\n';
  }
}

Trajectory load_trajectory(const std::string& directory) {
  const fs::path dir(directory);
  std::ifstream meta_in(dir / "metadata.json");
  require(static_cast<bool>(meta_in), ErrorKind::MissingArtifact, "missing " + (dir / "metadata.json").string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MissingArtifact, std::string("unreadable trajectory metadata: ") + e.what());
  }
  const Grid grid(meta.at("n_points").get<std::size_t>(), meta.at("length").get<double>());
  Trajectory traj{grid, meta.at("params").get<LleParams>(), std::nullopt, meta.at("linearized").get<bool>(),
                  meta.at("dt").get<double>(), meta.at("save_every").get<int>(), {}, {}};
  if (meta.contains("wave")) traj.wave = wave_from_json(meta.at("wave"));
  const auto count = meta.at("snapshots").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) {
    std::ifstream in(dir / snapshot_name(i), std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::MissingArtifact, "missing snapshot " + snapshot_name(i));
    char magic[8];
    in.read(magic, sizeof(magic));
    require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorKind::MissingArtifact,
            "bad snapshot header in " + snapshot_name(i));
    const auto version = read_le<std::uint32_t>(in);
    require(version == kSnapshotVersion, ErrorKind::MissingArtifact, "unsupported snapshot version");
    read_le<std::uint32_t>(in);
    const auto n = read_le<std::uint64_t>(in);
    require(n == grid.size(), ErrorKind::MissingArtifact, "snapshot size does not match metadata");
    const double t = read_le<double>(in);
    read_le<double>(in);
    ComplexField psi(static_cast<Eigen::Index>(n));
    for (auto& z : psi) {
      const double re = read_le<double>(in);
      const double im = read_le<double>(in);
      z = {re, im};
    }
    traj.append(t, std::move(psi));
  }
  return traj;
}

}  // namespace lle
