#pragma once

// Scripted runs around a Kelvin wave: long-time L1 stability, recovery of the
// rotation angle, and perimeter growth of filamenting patches.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/diagnostics.hpp"
#include "kelvin/evolution.hpp"
#include "kelvin/geometry.hpp"
#include "kelvin/vstate.hpp"

namespace kelvin {

enum class ExperimentKind { stability, rotation_tracking, filamentation };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::stability:
      return "stability";
    case ExperimentKind::rotation_tracking:
      return "rotation-tracking";
    case ExperimentKind::filamentation:
      return "filamentation";
  }
  return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "stability") return ExperimentKind::stability;
  if (s == "rotation-tracking" || s == "rotation_tracking") return ExperimentKind::rotation_tracking;
  if (s == "filamentation") return ExperimentKind::filamentation;
  throw InvalidArgument("unknown experiment kind: " + s);
}

/// Boundary-graph perturbation h = s sum_n w_n cos(n theta + phi_n) of the wave,
/// with s chosen so the initial L1 distance equals l1_size.
struct PerturbationSpec {
  /// Empty selects {2m, 3m}.
  std::vector<int> modes;
  /// Relative amplitudes; missing entries default to 1.
  std::vector<double> weights;
  double l1_size = 0.0;
  bool random_phases = true;
};

/// Explicit star-shaped initial patch r = r0 + sum (a_k cos k theta + b_k sin k theta).
struct ShapeSpec {
  double r0 = 1.0;
  std::vector<std::tuple<int, double, double>> terms;

  double radius(double theta) const {
    double r = r0;
    for (const auto& [k, a, b] : terms) r += a * std::cos(k * theta) + b * std::sin(k * theta);
    return r;
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::stability;
  std::string name = "run";
  int m = 3;
  double beta = 0.05;
  PerturbationSpec perturbation;
  std::optional<ShapeSpec> shape;
  double T = 20.0;
  double dt = 0.01;
  int N = 512;
  int solver_modes = 16;
  /// 0 picks a kind-dependent default.
  double log_interval = 0.0;
  std::vector<double> snapshot_times;
  /// Remeshing with h_max = h_max_factor * initial mean spacing.
  bool remesh = false;
  double h_max_factor = 2.0;
  double h_min_ratio = 8.0;
  std::size_t node_cap = 200000;
  int raster_rows = 2048;
  int raster_refine = 4;
  std::uint64_t seed = 1;
  double r_prime = 1.2;
  /// Stability verdict: max L1 distance to the rotated wave below this.
  double l1_threshold = 1e-2;
  /// Window |t - t'| <= window_factor * beta for the rotation drift.
  double window_factor = 0.5;
  /// Compute the L1-argmin angle estimator at every log time.
  bool track_min_rotation = true;
  double perimeter_ratio = 2.0;
  double growth_onset = 6.0;
  double coherence_limit = 0.75;
  /// Radii of passive seeds on the positive x axis.
  std::vector<double> trace_radii;
  double frame_interval = 0.05;

  double effective_log_interval() const {
    if (log_interval > 0.0) return log_interval;
    switch (kind) {
      case ExperimentKind::rotation_tracking:
        return std::max(dt, window_factor * beta / 5.0);
      case ExperimentKind::filamentation:
        return 0.25;
      default:
        return 0.1;
    }
  }
};

struct RunRecord {
  ExperimentConfig config;
  double omega = 0.0;
  Point moment_ref{};
  double initial_l1 = 0.0;
  double initial_max_radius = 0.0;
  double initial_perimeter = 0.0;
  double reference_area = 0.0;

  std::vector<double> t;
  std::vector<double> l1_fixed;
  std::vector<double> l1_min;
  std::vector<double> theta_moment;
  std::vector<double> theta_l1;
  std::vector<double> drift;
  std::vector<double> perimeter;
  std::vector<double> area;
  std::vector<double> impulse;
  std::vector<double> energy;
  std::vector<double> moment_re;
  std::vector<double> moment_im;
  std::vector<double> nodes;

  std::vector<double> trace_t;
  std::vector<std::vector<double>> trace_winding;
  std::vector<Snapshot> snapshots;

  std::map<std::string, double> metrics;
  std::map<std::string, bool> verdicts;
  bool truncated = false;
  std::string stop_reason;
  std::string error;
  double runtime_seconds = 0.0;
};

namespace detail {

// L1 distance of two polar graphs sharing the angle grid: int |R1^2 - R2^2| / 2.
inline double polar_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] * a[j] - b[j] * b[j]);
  return 0.5 * s * two_pi / static_cast<double>(a.size());
}

inline double unwrap_to(double value, double previous, int m) {
  return previous + torus_project(value - previous, m);
}

}  // namespace detail

/// Perturbed wave boundary radii on the grid theta_j = 2 pi j / n.
inline std::vector<double> perturbed_radii(const KelvinWave& w, const PerturbationSpec& p, int n,
                                           std::uint64_t seed) {
  std::vector<int> modes = p.modes;
  if (modes.empty()) modes = {2 * w.m, 3 * w.m};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, two_pi);
  std::vector<double> R(n), h(n, 0.0);
  for (int j = 0; j < n; ++j) R[j] = w.radius(two_pi * j / n);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double wk = k < p.weights.size() ? p.weights[k] : 1.0;
    const double ph = p.random_phases ? phase(rng) : 0.0;
    for (int j = 0; j < n; ++j) h[j] += wk * std::cos(modes[k] * two_pi * j / n + ph);
  }
  if (p.l1_size <= 0.0) return R;
  auto radii = [&](double s) {
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) r[j] = R[j] + s * h[j];
    return r;
  };
  // L1(s) is nearly linear; a few secant steps hit the target.
  double s0 = 0.0, f0 = -p.l1_size;
  double s1 = p.l1_size / std::max(1e-300, detail::polar_l1(radii(1.0), R)), f1 = detail::polar_l1(radii(s1), R) - p.l1_size;
  for (int it = 0; it < 30 && std::abs(f1) > 1e-14 * p.l1_size && f1 != f0; ++it) {
    const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = detail::polar_l1(radii(s1), R) - p.l1_size;
  }
  return radii(s1);
}

inline NodeContour radii_to_contour(const std::vector<double>& r) {
  const int n = static_cast<int>(r.size());
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) {
    if (!(r[j] > 0.0)) throw InvalidBoundary("perturbed radius is not positive");
    z[j] = std::polar(r[j], two_pi * j / n);
  }
  return NodeContour(std::move(z));
}

/// Maximum over pairs with |t_k - t_i| <= window of |T_m[theta_k - theta_i - Omega (t_k - t_i)]|,
/// skipping samples flagged unreliable.
inline double windowed_drift(const std::vector<double>& t, const std::vector<double>& theta, double omega,
                             int m, double window, const std::vector<bool>& reliable = {}) {
  double worst = 0.0;
  const double eps = 1e-12 * std::max(1.0, t.empty() ? 1.0 : std::abs(t.back()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!reliable.empty() && !reliable[i]) continue;
    for (std::size_t k = i + 1; k < t.size() && t[k] - t[i] <= window + eps; ++k) {
      if (!reliable.empty() && !reliable[k]) continue;
      worst = std::max(worst, std::abs(torus_project(theta[k] - theta[i] - omega * (t[k] - t[i]), m)));
    }
  }
  return worst;
}

/// Verdicts and summary metrics recomputed from the stored series alone.
inline void compute_verdicts(RunRecord& r) {
  const auto& c = r.config;
  r.metrics.clear();
  r.verdicts.clear();
  auto max_of = [](const std::vector<double>& v) {
    double x = 0.0;
    for (double e : v) x = std::max(x, e);
    return x;
  };
  r.metrics["initial_l1"] = r.initial_l1;
  r.metrics["initial_max_radius"] = r.initial_max_radius;
  r.verdicts["support_inside_r_prime"] = r.initial_max_radius < c.r_prime;
  if (!r.l1_fixed.empty()) r.metrics["max_l1_fixed"] = max_of(r.l1_fixed);
  if (!r.l1_min.empty()) r.metrics["max_l1_min"] = max_of(r.l1_min);
  if (!r.drift.empty()) {
    double d = 0.0;
    for (double e : r.drift) d = std::max(d, std::abs(e));
    r.metrics["max_abs_drift"] = d;
  }
  if (!r.area.empty()) {
    auto rel = [](const std::vector<double>& v) {
      double d = 0.0;
      for (double e : v) d = std::max(d, std::abs(e - v.front()) / std::abs(v.front()));
      return d;
    };
    r.metrics["area_drift"] = rel(r.area);
    r.metrics["impulse_drift"] = rel(r.impulse);
    if (!r.energy.empty() && r.energy.front() != 0.0) r.metrics["energy_drift"] = rel(r.energy);
  }

  switch (c.kind) {
    case ExperimentKind::stability: {
      r.verdicts["l1_within_threshold"] =
          !r.truncated && r.error.empty() && r.metrics["max_l1_fixed"] < c.l1_threshold;
      break;
    }
    case ExperimentKind::rotation_tracking: {
      const double window = c.window_factor * c.beta;
      const double iref = std::abs(r.moment_ref);
      std::vector<bool> reliable(r.t.size(), true);
      int flagged = 0;
      for (std::size_t k = 0; k < r.t.size(); ++k) {
        const double mod = std::hypot(r.moment_re[k], r.moment_im[k]);
        reliable[k] = mod >= 0.1 * iref;
        flagged += reliable[k] ? 0 : 1;
      }
      r.metrics["flagged_samples"] = flagged;
      r.metrics["window"] = window;
      r.metrics["windowed_drift"] = windowed_drift(r.t, r.theta_moment, r.omega, c.m, window, reliable);
      if (!r.theta_l1.empty()) {
        double gap = 0.0;
        for (std::size_t k = 0; k < r.t.size(); ++k)
          gap = std::max(gap, std::abs(torus_project(r.theta_moment[k] - r.theta_l1[k], c.m)));
        r.metrics["estimator_gap"] = gap;
        // |I(A) - I(B)| <= |A xor B| and |I_alpha - I| >= (2/pi) m |alpha| |I|.
        const double bound = 2.0 * std::max(r.metrics["max_l1_min"], 1e-300) / ((2.0 / pi) * c.m * iref);
        r.metrics["estimator_bound"] = bound;
        r.verdicts["estimators_agree"] = gap <= bound;
      }
      break;
    }
    case ExperimentKind::filamentation: {
      const double p0 = r.perimeter.empty() ? 0.0 : r.perimeter.front();
      const double pT = r.perimeter.empty() ? 0.0 : r.perimeter.back();
      r.metrics["perimeter_initial"] = p0;
      r.metrics["perimeter_final"] = pT;
      r.metrics["perimeter_ratio"] = p0 > 0.0 ? pT / p0 : 0.0;
      bool monotone = true;
      double prev = -INFINITY;
      for (std::size_t k = 0; k < r.t.size(); ++k) {
        if (r.t[k] < c.growth_onset - 1e-9) continue;
        if (!(r.perimeter[k] > prev)) monotone = false;
        prev = r.perimeter[k];
      }
      r.verdicts["initial_perimeter_below_20"] = p0 < 20.0;
      r.verdicts["perimeter_monotone_after_onset"] = monotone;
      r.verdicts["perimeter_ratio_reached"] = !r.truncated && pT >= c.perimeter_ratio * p0;
      if (!r.l1_min.empty() && r.reference_area > 0.0) {
        r.metrics["max_coherence_ratio"] = max_of(r.l1_min) / r.reference_area;
        r.verdicts["bulk_coherent"] = r.metrics["max_coherence_ratio"] <= c.coherence_limit;
      }
      if (r.trace_winding.size() >= 2 && !r.trace_t.empty()) {
        const auto& a = r.trace_winding[0];
        const auto& b = r.trace_winding[1];
        const std::size_t k = std::min(a.size(), b.size()) - 1;
        const double span = r.trace_t[k] - r.trace_t.front();
        const double ra = c.trace_radii[0], rb = c.trace_radii[1];
        auto disc_rate = [](double rr) { return rr <= 1.0 ? 0.5 : 0.5 / (rr * rr); };
        r.metrics["winding_gap_measured"] = a[k] - b[k];
        r.metrics["winding_gap_disc"] = (disc_rate(ra) - disc_rate(rb)) * span / two_pi;
      }
      break;
    }
  }
}

namespace detail {

struct RunSetup {
  KelvinWave wave;
  NodeContour initial;
  NodeContour reference;
};

inline RunSetup setup_run(const ExperimentConfig& c) {
  if (c.N < 16) throw InvalidArgument("experiment needs at least 16 nodes");
  if (!(c.T > 0.0) || !(c.dt > 0.0)) throw InvalidArgument("experiment needs positive T and dt");
  KelvinSolverOptions so;
  so.modes = c.solver_modes;
  RunSetup s{solve_kelvin(c.m, c.beta, so), NodeContour{}, NodeContour{}};
  s.reference = s.wave.contour(c.N);
  if (c.shape) {
    s.initial = polar_contour([&](double t) { return c.shape->radius(t); }, c.N);
  } else {
    s.initial = radii_to_contour(perturbed_radii(s.wave, c.perturbation, c.N, c.seed));
  }
  return s;
}

}  // namespace detail

/// Shared driver: evolves the configured patch and fills the series.
inline RunRecord run_experiment(const ExperimentConfig& c) {
  const auto t_start = std::chrono::steady_clock::now();
  RunRecord r;
  r.config = c;
  try {
    const auto s = detail::setup_run(c);
    const int m = c.m;
    r.omega = s.wave.omega;
    r.moment_ref = complex_moment(s.reference, m);
    r.initial_perimeter = perimeter(s.initial);
    double rmax = 0.0;
    for (const auto& p : s.initial) rmax = std::max(rmax, std::abs(p));
    r.initial_max_radius = rmax;

    RasterOptions raster;
    raster.rows = c.raster_rows;
    raster.refine = c.raster_refine;
    RotationFitOptions fit_opt;
    fit_opt.raster = raster;

    // The comparison patch: the wave itself, or for explicit shapes the wave
    // rescaled to the same area (a disc when beta = 0).
    NodeContour reference = s.reference;
    if (c.shape) {
      const double scale = std::sqrt(area(s.initial) / area(s.reference));
      std::vector<Point> z(reference.begin(), reference.end());
      for (auto& p : z) p *= scale;
      reference = NodeContour(std::move(z));
    }
    r.reference_area = area(reference);
    r.initial_l1 = symmetric_difference_area(s.initial, reference, raster);

    EvolveOptions eo;
    eo.log_interval = c.effective_log_interval();
    eo.moment_order = m;
    eo.log_energy = c.kind != ExperimentKind::rotation_tracking;
    eo.snapshot_times = c.snapshot_times;
    eo.node_cap = c.node_cap;
    if (!c.trace_radii.empty()) eo.frame_interval = c.frame_interval;
    if (c.remesh) {
      auto p = RemeshParams::from_initial(s.initial);
      p.h_max *= c.h_max_factor / 2.0;
      p.h_min = p.h_max / c.h_min_ratio;
      eo.remesh = p;
    }
    double theta_prev = 0.0, theta_l1_prev = 0.0;
    bool first = true;
    const bool fit_needed = c.track_min_rotation;
    eo.observer = [&](const EvolutionState& st, const LogEntry& e) {
      const double t = e.time;
      r.t.push_back(t);
      r.area.push_back(e.diag.area);
      r.impulse.push_back(e.diag.impulse);
      if (eo.log_energy) r.energy.push_back(e.diag.energy);
      r.perimeter.push_back(e.diag.perimeter);
      r.moment_re.push_back(e.diag.moment.real());
      r.moment_im.push_back(e.diag.moment.imag());
      r.nodes.push_back(static_cast<double>(e.nodes));
      const double raw = std::arg(e.diag.moment / r.moment_ref) / m;
      const double theta = first ? raw : detail::unwrap_to(raw, theta_prev, m);
      theta_prev = theta;
      r.theta_moment.push_back(theta);
      r.drift.push_back(torus_project(theta - r.omega * t, m));
      if (c.kind != ExperimentKind::filamentation)
        r.l1_fixed.push_back(symmetric_difference_area(st.contour, rotate(reference, r.omega * t), raster));
      if (fit_needed) {
        const auto fit = min_rotation_distance(st.contour, reference, m, fit_opt);
        r.l1_min.push_back(fit.distance);
        const double th = first ? fit.angle : detail::unwrap_to(fit.angle, theta_l1_prev, m);
        theta_l1_prev = th;
        r.theta_l1.push_back(th);
      }
      first = false;
      return true;
    };
    const auto h = evolve(EvolutionState{0.0, s.initial, 0}, c.T, c.dt, eo);
    r.truncated = h.truncated;
    r.stop_reason = h.stop_reason;
    r.snapshots = h.snapshots;
    if (!c.trace_radii.empty() && h.frames.size() >= 2) {
      std::vector<Point> seeds;
      for (double rad : c.trace_radii) seeds.emplace_back(rad, 0.0);
      const auto ts = trace_particles(h, seeds);
      r.trace_t = ts.times;
      r.trace_winding = ts.winding;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    r.stop_reason = "error";
  }
  compute_verdicts(r);
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return r;
}

inline RunRecord run_stability(ExperimentConfig c) {
  c.kind = ExperimentKind::stability;
  return run_experiment(c);
}

inline RunRecord run_rotation_tracking(ExperimentConfig c) {
  c.kind = ExperimentKind::rotation_tracking;
  return run_experiment(c);
}

inline RunRecord run_filamentation(ExperimentConfig c) {
  c.kind = ExperimentKind::filamentation;
  return run_experiment(c);
}

/// Figure-1 style patch r < 2 + sin(3 theta).
inline ExperimentConfig figure_one_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::filamentation;
  c.name = "figure-1";
  c.m = 3;
  c.beta = 0.0;
  c.shape = ShapeSpec{2.0, {{3, 0.0, 1.0}}};
  c.T = 20.0;
  c.N = 256;
  c.dt = 0.02;
  c.remesh = true;
  c.snapshot_times = {0.0, 3.0, 6.0, 9.0, 15.0, 20.0};
  return c;
}

struct SweepRow {
  std::string name;
  std::string kind;
  std::map<std::string, double> metrics;
  std::map<std::string, bool> verdicts;
  std::string error;
  double runtime_seconds = 0.0;
};

inline SweepRow summarize(const RunRecord& r) {
  return {r.config.name, to_string(r.config.kind), r.metrics, r.verdicts, r.error, r.runtime_seconds};
}

/// Runs the configs concurrently (bounded by the hardware threads); rows keep
/// the input order and a failing run only affects its own row.
inline std::vector<RunRecord> sweep_records(const std::vector<ExperimentConfig>& cfgs, unsigned threads = 0) {
  if (!cfgs.empty()) {
    for (const auto& c : cfgs)
      if (c.kind != cfgs.front().kind) throw InvalidArgument("sweep requires a single experiment kind");
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunRecord> out(cfgs.size());
  std::size_t next = 0;
  while (next < cfgs.size()) {
    std::vector<std::future<RunRecord>> batch;
    const std::size_t first = next;
    for (; next < cfgs.size() && next - first < threads; ++next)
      batch.push_back(std::async(std::launch::async, [&cfgs, next] { return run_experiment(cfgs[next]); }));
    for (std::size_t k = 0; k < batch.size(); ++k) out[first + k] = batch[k].get();
  }
  return out;
}

inline std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& cfgs, unsigned threads = 0) {
  std::vector<SweepRow> rows;
  for (const auto& r : sweep_records(cfgs, threads)) rows.push_back(summarize(r));
  return rows;
}

}  // namespace kelvin
