#pragma once

// Contour dynamics: boundary nodes are advected by the self-induced velocity
// with classical RK4, remeshed when filaments stretch, and logged.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/diagnostics.hpp"
#include "kelvin/field.hpp"
#include "kelvin/geometry.hpp"
#include "kelvin/spectral.hpp"

namespace kelvin {

struct EvolutionState {
  double time = 0.0;
  NodeContour contour;
  long step_count = 0;
};

struct RemeshParams {
  double h_max = 0.0;
  double h_min = 0.0;
  /// Node density grows like 1 + curvature_weight * h_max * |kappa|.
  double curvature_weight = 1.0;
  /// A short segment end is removable only where |kappa| * h_max is below this.
  double low_curvature = 0.2;
  /// Restore the enclosed area after redistribution by a uniform normal shift.
  bool preserve_area = true;

  /// h_max = twice the mean initial spacing, h_min = h_max / 8.
  static RemeshParams from_initial(const NodeContour& c) {
    RemeshParams p;
    p.h_max = 2.0 * perimeter(c) / static_cast<double>(c.size());
    p.h_min = p.h_max / 8.0;
    return p;
  }

  void validate() const {
    if (!(h_min > 0.0) || !(h_max > h_min))
      throw InvalidArgument("remesh bounds need 0 < h_min < h_max");
  }
};

namespace detail {

inline std::vector<double> segment_lengths(std::span<const Point> z) {
  const std::size_t n = z.size();
  std::vector<double> len(n);
  for (std::size_t i = 0; i < n; ++i) len[i] = std::abs(z[(i + 1) % n] - z[i]);
  return len;
}

// Menger curvature through (z_{i-1}, z_i, z_{i+1}).
inline std::vector<double> discrete_curvature(std::span<const Point> z) {
  const std::size_t n = z.size();
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = z[i] - z[(i + n - 1) % n];
    const Point b = z[(i + 1) % n] - z[i];
    const double den = std::abs(a) * std::abs(b) * std::abs(a + b);
    k[i] = den > 0.0 ? 2.0 * std::abs(cross(a, b)) / den : 0.0;
  }
  return k;
}

// The nodes resolve a smooth periodic curve: Fourier coefficients above a
// quarter of the band are negligible.
inline bool spectrally_resolved(std::span<const Point> z, double tol = 1e-7) {
  const int n = static_cast<int>(z.size());
  const auto hat = spectral::forward(z);
  double top = 0.0, tail = 0.0;
  for (int k = 1; k < n; ++k) {
    const double a = std::abs(hat[k]);
    top = std::max(top, a);
    if (std::abs(spectral::wavenumber(k, n)) > n / 4) tail = std::max(tail, a);
  }
  return tail <= tol * top;
}

// Spectral redistribution: new parameters solve S(t) = j S(2 pi) / count with
// S the integral of a band-limited density, then the trigonometric
// interpolant is evaluated there.
inline std::vector<Point> redistribute_spectral(std::span<const Point> z, int count,
                                                const RemeshParams& p) {
  const int n = static_cast<int>(z.size());
  const int fine = 4 * n;
  const auto Z = spectral::resample(z, fine);
  const auto dZ = spectral::derivative(Z);
  const auto ddZ = spectral::second_derivative(Z);
  std::vector<Point> q(fine);
  double mean = 0.0;
  for (int k = 0; k < fine; ++k) {
    const double speed = std::abs(dZ[k]);
    const double kappa = cross(dZ[k], ddZ[k]) / (speed * speed * speed);
    q[k] = speed * (1.0 + p.curvature_weight * p.h_max * std::abs(kappa));
    mean += q[k].real();
  }
  mean /= fine;
  auto hat = spectral::forward(q);
  const int kc = std::max(4, n / 16);
  const int kmax = std::min(fine / 2 - 1, 3 * kc);
  std::vector<Point> coef(kmax + 1);  // density = sum c_k e^{ikt} + conj
  for (int k = 0; k <= kmax; ++k) {
    const double taper = std::exp(-static_cast<double>(k * k) / (kc * kc));
    coef[k] = hat[k] * taper / static_cast<double>(fine);
  }
  // Keep the filtered density safely positive.
  double qmin = INFINITY;
  std::vector<double> qs(fine);
  for (int j = 0; j < fine; ++j) {
    const Point e = unit(two_pi * j / fine);
    Point pos = 1.0;
    double v = coef[0].real();
    for (int k = 1; k <= kmax; ++k) {
      pos *= e;
      v += 2.0 * (coef[k] * pos).real();
    }
    qs[j] = v;
    qmin = std::min(qmin, v);
  }
  if (qmin < 0.2 * mean) {
    const double lift = 0.2 * mean - qmin;
    coef[0] += lift;
    for (auto& v : qs) v += lift;
  }
  auto density = [&](double t) {
    const Point e = unit(t);
    Point pos = 1.0;
    double v = coef[0].real();
    for (int k = 1; k <= kmax; ++k) {
      pos *= e;
      v += 2.0 * (coef[k] * pos).real();
    }
    return v;
  };
  auto primitive = [&](double t) {
    const Point e = unit(t);
    Point pos = 1.0;
    double v = coef[0].real() * t;
    for (int k = 1; k <= kmax; ++k) {
      pos *= e;
      v += 2.0 * (coef[k] * (pos - 1.0) / Point(0.0, k)).real();
    }
    return v;
  };
  std::vector<double> cum(fine + 1, 0.0);
  const double dt = two_pi / fine;
  for (int j = 0; j < fine; ++j) cum[j + 1] = cum[j] + 0.5 * dt * (qs[j] + qs[(j + 1) % fine]);
  const double total = coef[0].real() * two_pi;
  std::vector<double> t(count);
  for (int j = 0; j < count; ++j) {
    const double sigma = total * j / count;
    const double target = sigma * cum[fine] / total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const int seg = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, fine - 1);
    const double frac = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    double tj = (seg + frac) * dt;
    for (int it_n = 0; it_n < 6; ++it_n) tj -= (primitive(tj) - sigma) / density(tj);
    t[j] = tj;
  }
  return spectral::interpolate(z, t);
}

// Chord-length cubic Hermite redistribution for irregular node sets.
inline std::vector<Point> redistribute_hermite(std::span<const Point> z, int count,
                                               const RemeshParams& p) {
  const int n = static_cast<int>(z.size());
  const auto len = segment_lengths(z);
  const auto kappa = discrete_curvature(z);
  std::vector<Point> tangent(n);
  for (int i = 0; i < n; ++i) {
    const double l0 = len[(i + n - 1) % n], l1 = len[i];
    const Point d0 = (z[i] - z[(i + n - 1) % n]) / l0;
    const Point d1 = (z[(i + 1) % n] - z[i]) / l1;
    tangent[i] = (d1 * l0 + d0 * l1) / (l0 + l1);
  }
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 + p.curvature_weight * p.h_max * 0.5 * (kappa[i] + kappa[(i + 1) % n]);
    cum[i + 1] = cum[i] + len[i] * w;
  }
  std::vector<Point> out(count);
  for (int j = 0; j < count; ++j) {
    const double target = cum[n] * j / count;
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const int seg = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, n - 1);
    const double u = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    const Point a = z[seg], b = z[(seg + 1) % n];
    const Point ta = tangent[seg] * len[seg], tb = tangent[(seg + 1) % n] * len[seg];
    const double u2 = u * u, u3 = u2 * u;
    out[j] = (2 * u3 - 3 * u2 + 1) * a + (u3 - 2 * u2 + u) * ta + (-2 * u3 + 3 * u2) * b +
             (u3 - u2) * tb;
  }
  return out;
}

inline std::vector<Point> restore_area(std::vector<Point> z, double target) {
  for (int it = 0; it < 4; ++it) {
    const auto dz = spectral::derivative(z);
    double a = 0.0, len = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      a += cross(z[j], dz[j]);
      len += std::abs(dz[j]);
    }
    const double w = two_pi / static_cast<double>(z.size());
    a *= 0.5 * w;
    len *= w;
    const double shift = (target - a) / len;
    if (std::abs(target - a) <= 1e-15 * std::abs(target)) break;
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += shift * dz[j] / std::abs(dz[j]) * Point(0.0, -1.0);
  }
  return z;
}

}  // namespace detail

/// Identity when no segment is longer than h_max and no low-curvature node sits
/// on a segment shorter than h_min.  Otherwise the node count follows the
/// local rules (ceil(l / h_max) - 1 insertions per long segment, removal of
/// flat nodes next to short segments) and the nodes are redistributed by a
/// curvature-weighted density along the curve.
inline NodeContour remesh(const NodeContour& c, const RemeshParams& p) {
  p.validate();
  const int n = static_cast<int>(c.size());
  const auto len = detail::segment_lengths(c.nodes());
  const auto kappa = detail::discrete_curvature(c.nodes());
  int inserted = 0;
  for (double l : len)
    if (l > p.h_max) inserted += static_cast<int>(std::ceil(l / p.h_max)) - 1;
  int removed = 0;
  bool prev_removed = false;
  for (int i = 0; i < n; ++i) {
    const double shortest = std::min(len[(i + n - 1) % n], len[i]);
    const bool removable = shortest < p.h_min && kappa[i] * p.h_max < p.low_curvature;
    if (removable && !prev_removed) {
      ++removed;
      prev_removed = true;
    } else {
      prev_removed = false;
    }
  }
  if (inserted == 0 && removed == 0) return c;
  const int count = std::max(16, n + inserted - removed);
  auto z = detail::spectrally_resolved(c.nodes()) ? detail::redistribute_spectral(c.nodes(), count, p)
                                                : detail::redistribute_hermite(c.nodes(), count, p);
  if (p.preserve_area) z = detail::restore_area(std::move(z), area(c));
  return NodeContour(std::move(z));
}

/// Largest node speed and the CFL limit 0.5 * min spacing / max|u|.
inline double cfl_limit(const NodeContour& c) {
  const auto f = node_field(c, false);
  double umax = 0.0;
  for (const auto& u : f.velocity) umax = std::max(umax, std::abs(u));
  return umax > 0.0 ? 0.5 * c.min_node_spacing() / umax : INFINITY;
}

/// One classical RK4 step; each stage uses the velocity of the frozen stage contour.
inline EvolutionState step(const EvolutionState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const auto& z0 = s.contour.nodes();
  const std::size_t n = z0.size();
  auto velocity = [](const std::vector<Point>& z) {
    auto dz = spectral::derivative(z);
    return node_field(SampledCurve(z, std::move(dz)), false).velocity;
  };
  const std::vector<Point> base(z0.begin(), z0.end());
  const auto k1 = velocity(base);
  double umax = 0.0;
  for (const auto& u : k1) umax = std::max(umax, std::abs(u));
  const double hmin = s.contour.min_node_spacing();
  if (dt * umax > 0.5 * hmin)
    throw CflViolation("time step violates the CFL guard", 0.5 * hmin / umax);
  std::vector<Point> zs(n);
  for (std::size_t j = 0; j < n; ++j) zs[j] = base[j] + 0.5 * dt * k1[j];
  const auto k2 = velocity(zs);
  for (std::size_t j = 0; j < n; ++j) zs[j] = base[j] + 0.5 * dt * k2[j];
  const auto k3 = velocity(zs);
  for (std::size_t j = 0; j < n; ++j) zs[j] = base[j] + dt * k3[j];
  const auto k4 = velocity(zs);
  for (std::size_t j = 0; j < n; ++j)
    zs[j] = base[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  EvolutionState out;
  out.time = s.time + dt;
  out.contour = NodeContour::any_orientation(std::move(zs));
  out.step_count = s.step_count + 1;
  return out;
}

struct LogEntry {
  double time = 0.0;
  Diagnostics diag;
  std::size_t nodes = 0;
};

struct Snapshot {
  double time = 0.0;
  NodeContour contour;
};

struct EvolveOptions {
  /// Diagnostics cadence; 0 logs only the start and the end.
  double log_interval = 0.1;
  /// Symmetry order of the logged complex moment.
  int moment_order = 2;
  bool log_energy = true;
  std::vector<double> snapshot_times;
  /// Cadence of the frames kept for particle tracing; 0 disables.
  double frame_interval = 0.0;
  std::optional<RemeshParams> remesh;
  std::size_t node_cap = 200000;
  /// Called after every log entry; returning false stops the run.
  std::function<bool(const EvolutionState&, const LogEntry&)> observer;
};

struct History {
  std::vector<LogEntry> log;
  std::vector<Snapshot> snapshots;
  std::vector<Snapshot> frames;
  EvolutionState final_state;
  bool truncated = false;
  std::string stop_reason;
  int remesh_events = 0;
};

/// Steps of size at most dt that land exactly on every log, snapshot and
/// frame time; steps shrink further when the CFL guard requires it.
inline History evolve(const EvolutionState& s0, double T, double dt, const EvolveOptions& opt = {}) {
  if (!(T > 0.0)) throw InvalidArgument("evolution horizon must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (opt.remesh) opt.remesh->validate();
  History h;
  EvolutionState s = s0;
  const double t_end = s0.time + T;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));

  std::vector<double> events{t_end};
  auto add_grid = [&](double interval) {
    if (interval <= 0.0) return;
    for (long k = 1;; ++k) {
      const double t = s0.time + k * interval;
      if (t >= t_end - eps) break;
      events.push_back(t);
    }
  };
  add_grid(opt.log_interval);
  add_grid(opt.frame_interval);
  for (double t : opt.snapshot_times)
    if (t > s0.time + eps && t < t_end - eps) events.push_back(t);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [&](double a, double b) { return std::abs(a - b) <= eps; }),
               events.end());

  auto near_grid = [&](double t, double interval) {
    if (interval <= 0.0) return false;
    const double k = std::round((t - s0.time) / interval);
    return std::abs(s0.time + k * interval - t) <= eps;
  };
  auto record = [&](bool force_log) {
    if (force_log || near_grid(s.time, opt.log_interval)) {
      LogEntry e{s.time, diagnose(s.contour, opt.moment_order, opt.log_energy), s.contour.size()};
      h.log.push_back(e);
      if (opt.observer && !opt.observer(s, e)) return false;
    }
    for (double t : opt.snapshot_times)
      if (std::abs(t - s.time) <= eps) h.snapshots.push_back({s.time, s.contour});
    if (opt.frame_interval > 0.0 && near_grid(s.time, opt.frame_interval))
      h.frames.push_back({s.time, s.contour});
    return true;
  };

  if (!record(true)) {
    h.final_state = s;
    h.truncated = true;
    h.stop_reason = "observer";
    return h;
  }
  double dt_local = dt;
  for (double target : events) {
    while (s.time < target - eps) {
      const double remaining = target - s.time;
      const long k = static_cast<long>(std::ceil(remaining / dt_local - 1e-9));
      const double step_dt = remaining / std::max(1L, k);
      try {
        s = step(s, step_dt);
      } catch (const CflViolation& e) {
        dt_local = 0.9 * e.suggested_dt();
        continue;
      }
      if (k <= 1) s.time = target;
      if (opt.remesh) {
        const std::size_t before = s.contour.size();
        auto c = remesh(s.contour, *opt.remesh);
        if (c.size() != before || !std::equal(c.begin(), c.end(), s.contour.begin())) ++h.remesh_events;
        s.contour = std::move(c);
      }
      if (s.contour.size() > opt.node_cap) {
        h.truncated = true;
        h.stop_reason = "node cap exceeded";
        record(true);
        h.final_state = s;
        return h;
      }
      dt_local = std::min(dt, std::max(dt_local * 1.5, 1e-300));
    }
    if (!record(std::abs(target - t_end) <= eps)) {
      h.final_state = s;
      h.truncated = true;
      h.stop_reason = "observer";
      return h;
    }
  }
  h.final_state = s;
  h.stop_reason = "completed";
  return h;
}

struct TrajectorySet {
  std::vector<Point> seeds;
  std::vector<double> times;
  /// paths[s][k] is the position at times[k]; shorter when the seed escaped.
  std::vector<std::vector<Point>> paths;
  /// Unwrapped polar angle change divided by 2 pi.
  std::vector<std::vector<double>> winding;
  std::vector<bool> escaped;
};

struct TraceOptions {
  /// Integration step; 0 uses the frame spacing.
  double dt = 0.0;
  /// Escape radius; 0 uses three times the largest frame radius.
  double box = 0.0;
};

/// RK4 through the velocity of the recorded frames: node positions are
/// interpolated linearly in time when consecutive frames share the node
/// count, otherwise the two velocities are blended.
inline TrajectorySet trace_particles(std::span<const Snapshot> frames, std::span<const Point> seeds,
                                     const TraceOptions& opt = {}) {
  if (frames.size() < 2) throw InvalidArgument("particle tracing needs at least two frames");
  double rmax = 0.0;
  for (const auto& f : frames)
    for (const auto& p : f.contour) rmax = std::max(rmax, std::abs(p));
  const double box = opt.box > 0.0 ? opt.box : 3.0 * rmax;
  for (const auto& x : seeds)
    if (std::abs(x) > box) throw InvalidArgument("seed lies outside the recorded domain");

  const double t0 = frames.front().time, t1 = frames.back().time;
  const double dt_nominal = opt.dt > 0.0 ? opt.dt : (t1 - t0) / static_cast<double>(frames.size() - 1);
  const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt_nominal - 1e-9)));
  const double dt = (t1 - t0) / steps;

  std::vector<PatchField> fields;
  fields.reserve(frames.size());
  for (const auto& f : frames) fields.emplace_back(f.contour);

  // Velocity field at time t as a callable over points.
  struct Blend {
    std::optional<PatchField> field;
    const PatchField* a = nullptr;
    const PatchField* b = nullptr;
    double w = 0.0;
    Point operator()(Point x) const {
      if (field) return field->velocity(x);
      if (!b || w == 0.0) return a->velocity(x);
      return (1.0 - w) * a->velocity(x) + w * b->velocity(x);
    }
  };
  auto at = [&](double t) {
    Blend out;
    auto it = std::upper_bound(frames.begin(), frames.end(), t,
                               [](double v, const Snapshot& s) { return v < s.time; });
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - frames.begin()) - 1));
    if (i >= frames.size() - 1) i = frames.size() - 2;
    const double ta = frames[i].time, tb = frames[i + 1].time;
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    if (w <= 1e-14) {
      out.a = &fields[i];
      return out;
    }
    if (w >= 1.0 - 1e-14) {
      out.a = &fields[i + 1];
      return out;
    }
    const auto& ca = frames[i].contour;
    const auto& cb = frames[i + 1].contour;
    if (ca.size() == cb.size()) {
      std::vector<Point> z(ca.size());
      for (std::size_t j = 0; j < z.size(); ++j) z[j] = (1.0 - w) * ca[j] + w * cb[j];
      out.field.emplace(NodeContour::any_orientation(std::move(z)));
    } else {
      out.a = &fields[i];
      out.b = &fields[i + 1];
      out.w = w;
    }
    return out;
  };

  TrajectorySet ts;
  ts.seeds.assign(seeds.begin(), seeds.end());
  ts.times.resize(steps + 1);
  for (long k = 0; k <= steps; ++k) ts.times[k] = t0 + k * dt;
  const std::size_t ns = seeds.size();
  ts.paths.assign(ns, {});
  ts.winding.assign(ns, {});
  ts.escaped.assign(ns, false);
  std::vector<double> angle(ns), angle0(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    ts.paths[s].push_back(seeds[s]);
    angle[s] = angle0[s] = std::arg(seeds[s]);
    ts.winding[s].push_back(0.0);
  }
  for (long k = 0; k < steps; ++k) {
    const double t = ts.times[k];
    const Blend v1 = at(t), v2 = at(t + 0.5 * dt), v3 = at(t + dt);
    for (std::size_t s = 0; s < ns; ++s) {
      if (ts.escaped[s]) continue;
      const Point x = ts.paths[s].back();
      const Point a = v1(x);
      const Point b = v2(x + 0.5 * dt * a);
      const Point c = v2(x + 0.5 * dt * b);
      const Point d = v3(x + dt * c);
      const Point xn = x + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
      if (!std::isfinite(xn.real()) || !std::isfinite(xn.imag()) || std::abs(xn) > box) {
        ts.escaped[s] = true;
        continue;
      }
      if (std::abs(xn) > 0.0 && std::abs(x) > 0.0) angle[s] += std::arg(xn / x);
      ts.paths[s].push_back(xn);
      ts.winding[s].push_back((angle[s] - angle0[s]) / two_pi);
    }
  }
  return ts;
}

inline TrajectorySet trace_particles(const History& h, std::span<const Point> seeds,
                                     const TraceOptions& opt = {}) {
  return trace_particles(std::span<const Snapshot>(h.frames), seeds, opt);
}

}  // namespace kelvin
