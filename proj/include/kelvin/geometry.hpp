#pragma once

// Geometric measures of patches, rotations, and the rasterised L1 distance.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"

namespace kelvin {

/// Exact area of the polygon through the nodes (shoelace).
inline double polygon_area(const NodeContour& c) {
  return NodeContour::signed_shoelace(c.nodes());
}

/// Area enclosed by the smooth curve through the nodes,
/// (1/2) oint x dy - y dx with spectral derivatives.
inline double area(const NodeContour& c) {
  if (c.size() < 3) throw InvalidContour("contour needs at least 3 nodes");
  const SampledCurve s(c);
  double a = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) a += cross(s.z[j], s.dz[j]);
  return 0.5 * a * s.weight();
}

/// Sum of segment lengths.
inline double perimeter(const NodeContour& c) {
  double p = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) p += std::abs(c[(i + 1) % c.size()] - c[i]);
  return p;
}

/// int_A |x|^2 dx, through the field x |x|^2 / 4 whose divergence is |x|^2.
inline double angular_impulse(const NodeContour& c) {
  const SampledCurve s(c);
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += std::norm(s.z[j]) * cross(s.z[j], s.dz[j]);
  return 0.25 * sum * s.weight();
}

namespace detail {

// int_A e^{i m theta} dx by fan triangles from the origin (exact per triangle
// up to a 16-point Gauss rule in the radial-angle variable).  Used when the
// boundary passes through the origin, where the boundary form is singular.
inline Point fan_moment(const NodeContour& c, int m) {
  Point total{};
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = c[i], b = c[(i + 1) % n];
    if (std::abs(a) < 1e-300 || std::abs(b) < 1e-300) continue;
    // The triangle (0, a, b) in polar form: theta from arg a to arg a + dphi,
    // r up to the segment distance; int r dr = rho(theta)^2 / 2.
    const double phi_a = std::arg(a);
    const double dphi = std::arg(b / a);
    const Point d = b - a;
    const Point foot = a - (dot(a, d) / std::norm(d)) * d;
    const double dist = std::abs(foot);
    if (dist < 1e-300) continue;
    const double psi0 = std::arg(foot);
    static constexpr double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                     0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
    static constexpr double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                     0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                     0.0622535239386479, 0.0271524594117541};
    Point part{};
    for (int q = 0; q < 16; ++q) {
      const double x = q < 8 ? -gx[7 - q] : gx[q - 8];
      const double wq = q < 8 ? gw[7 - q] : gw[q - 8];
      const double theta = phi_a + 0.5 * dphi * (x + 1.0);
      const double rho = dist / std::cos(theta - psi0);
      part += wq * unit(m * theta) * (0.5 * rho * rho);
    }
    total += part * (0.5 * dphi);
  }
  return total;
}

}  // namespace detail

/// int_A e^{i m theta} dx; the boundary form uses the field x e^{i m theta} / 2.
inline Point complex_moment(const NodeContour& c, int m) {
  if (m < 1) throw InvalidArgument("complex_moment requires m >= 1 (use area for m = 0)");
  double rmin = INFINITY, scale = 0.0;
  for (const auto& p : c) {
    rmin = std::min(rmin, std::abs(p));
    scale = std::max(scale, std::abs(p));
  }
  if (rmin < 1e-8 * scale) return detail::fan_moment(c, m);
  const SampledCurve s(c);
  Point sum{};
  for (std::size_t j = 0; j < s.size(); ++j) {
    const Point phase = std::pow(s.z[j] / std::abs(s.z[j]), m);
    sum += phase * cross(s.z[j], s.dz[j]);
  }
  return 0.5 * sum * s.weight();
}

inline Point centroid(const NodeContour& c) {
  const SampledCurve s(c);
  double mx = 0.0, my = 0.0, a = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double x = s.z[j].real(), y = s.z[j].imag();
    mx += 0.5 * x * x * s.dz[j].imag();
    my -= 0.5 * y * y * s.dz[j].real();
    a += cross(s.z[j], s.dz[j]);
  }
  a *= 0.5;
  return {mx / a, my / a};
}

/// Counter-clockwise rotation of every node by alpha.
inline NodeContour rotate(const NodeContour& c, double alpha) {
  const Point r = unit(alpha);
  std::vector<Point> z(c.begin(), c.end());
  for (auto& p : z) p *= r;
  return NodeContour(std::move(z));
}

inline NodeContour translate(const NodeContour& c, Point d) {
  std::vector<Point> z(c.begin(), c.end());
  for (auto& p : z) p += d;
  return NodeContour(std::move(z));
}

/// Representative of alpha modulo 2 pi / m in [-pi/m, pi/m).
inline double torus_project(double alpha, int m) {
  if (m < 1) throw InvalidArgument("torus_project requires m >= 1");
  const double period = two_pi / m;
  double r = std::fmod(alpha + pi / m, period);
  if (r < 0.0) r += period;
  r -= pi / m;
  if (r >= pi / m) r -= period;
  return r;
}

struct RasterOptions {
  int rows = 2048;
  double margin = 0.1;
  /// Spectral refinement factor applied to both contours before scanning;
  /// 1 treats the nodes as an exact polygon.
  int refine = 1;
  /// Fixed scan window [ymin, ymax]; otherwise the joint bounding box.
  std::optional<std::pair<double, double>> y_window;
};


namespace detail {

// Sorted crossings of every scanline y_r = ylo + (r + 1/2) dy with the polygon,
// bucketed per row (half-open rule: an edge covers min(ya, yb) <= y < max).
struct ScanTable {
  std::vector<std::size_t> offset;
  std::vector<double> xs;

  ScanTable(std::span<const Point> z, double ylo, double dy, int rows) : offset(rows + 1, 0) {
    const std::size_t n = z.size();
    auto row_range = [&](Point a, Point b) {
      const double lo = std::min(a.imag(), b.imag()), hi = std::max(a.imag(), b.imag());
      int r0 = static_cast<int>(std::ceil((lo - ylo) / dy - 0.5));
      int r1 = static_cast<int>(std::ceil((hi - ylo) / dy - 0.5));
      r0 = std::clamp(r0 - 1, 0, rows);
      r1 = std::clamp(r1 + 1, 0, rows);
      while (r0 < r1 && ylo + (r0 + 0.5) * dy < lo) ++r0;
      while (r1 > r0 && ylo + (r1 - 0.5) * dy >= hi) --r1;
      return std::pair{r0, r1};
    };
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = z[i], b = z[(i + 1) % n];
      if (a.imag() == b.imag()) continue;
      const auto [r0, r1] = row_range(a, b);
      for (int r = r0; r < r1; ++r) ++offset[r + 1];
    }
    for (int r = 0; r < rows; ++r) offset[r + 1] += offset[r];
    xs.resize(offset[rows]);
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = z[i], b = z[(i + 1) % n];
      if (a.imag() == b.imag()) continue;
      const auto [r0, r1] = row_range(a, b);
      for (int r = r0; r < r1; ++r) {
        const double y = ylo + (r + 0.5) * dy;
        const double s = (y - a.imag()) / (b.imag() - a.imag());
        xs[fill[r]++] = a.real() + s * (b.real() - a.real());
      }
    }
    for (int r = 0; r < rows; ++r) std::sort(xs.begin() + offset[r], xs.begin() + offset[r + 1]);
  }

  std::span<const double> row(int r) const {
    return {xs.data() + offset[r], offset[r + 1] - offset[r]};
  }
};

inline double xor_length(std::span<const double> a, std::span<const double> b) {
  std::size_t i = 0, j = 0;
  bool in_a = false, in_b = false;
  double last = 0.0, len = 0.0;
  while (i < a.size() || j < b.size()) {
    const bool take_a = j >= b.size() || (i < a.size() && a[i] <= b[j]);
    const double x = take_a ? a[i++] : b[j++];
    if (in_a != in_b) len += x - last;
    if (take_a) {
      in_a = !in_a;
    } else {
      in_b = !in_b;
    }
    last = x;
  }
  return len;
}

}  // namespace detail

/// |A xor B| by scanlines: each of `rows` horizontal lines is intersected
/// exactly with both polygons and the XOR length is summed (midpoint rule in y).
inline double symmetric_difference_area(const NodeContour& a, const NodeContour& b,
                                        const RasterOptions& opt = {}) {
  if (opt.rows < 1) throw InvalidArgument("raster needs at least one row");
  const NodeContour ra = refine(a, opt.refine);
  const NodeContour rb = refine(b, opt.refine);
  double ylo, yhi;
  if (opt.y_window) {
    ylo = opt.y_window->first;
    yhi = opt.y_window->second;
  } else {
    ylo = INFINITY;
    yhi = -INFINITY;
    for (const auto* c : {&ra, &rb})
      for (const auto& p : *c) {
        ylo = std::min(ylo, p.imag());
        yhi = std::max(yhi, p.imag());
      }
    const double pad = opt.margin * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  const double dy = (yhi - ylo) / opt.rows;
  const detail::ScanTable ta(ra.nodes(), ylo, dy, opt.rows);
  const detail::ScanTable tb(rb.nodes(), ylo, dy, opt.rows);
  double total = 0.0;
  for (int r = 0; r < opt.rows; ++r) total += detail::xor_length(ta.row(r), tb.row(r));
  return total * dy;
}

/// True when |c xor R_{2pi/m} c| < tol * area(c).
inline bool check_m_fold(const NodeContour& c, int m, double tol = 1e-6,
                         RasterOptions opt = {.rows = 2048, .margin = 0.1, .refine = 8, .y_window = {}}) {
  if (m < 2) throw InvalidArgument("check_m_fold requires m >= 2");
  const double d = symmetric_difference_area(c, rotate(c, two_pi / m), opt);
  return d < tol * area(c);
}

struct RotationFit {
  double distance = 0.0;
  double angle = 0.0;
  bool converged = true;
};

struct RotationFitOptions {
  int scan = 64;
  int golden_iterations = 40;
  double angle_tol = 1e-7;
  RasterOptions raster = {};
};

/// inf over alpha in [-pi/m, pi/m) of |a xor rotate(ref, alpha)|: coarse scan
/// then golden-section refinement around the best scan angle.
inline RotationFit min_rotation_distance(const NodeContour& a, const NodeContour& ref, int m,
                                         const RotationFitOptions& opt = {}) {
  if (m < 1) throw InvalidArgument("min_rotation_distance requires m >= 1");
  const double half = pi / m;
  const double step = 2.0 * half / opt.scan;
  auto objective = [&](double alpha) {
    return symmetric_difference_area(a, rotate(ref, alpha), opt.raster);
  };
  double best_alpha = -half, best = INFINITY;
  for (int k = 0; k < opt.scan; ++k) {
    const double alpha = -half + k * step;
    const double f = objective(alpha);
    if (f < best || (f == best && std::abs(alpha) < std::abs(best_alpha))) {
      best = f;
      best_alpha = alpha;
    }
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_alpha - step, hi = best_alpha + step;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  int it = 0;
  for (; it < opt.golden_iterations && hi - lo > opt.angle_tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = objective(x2);
    }
  }
  RotationFit fit;
  const double xm = f1 <= f2 ? x1 : x2;
  const double fm = std::min(f1, f2);
  fit.converged = hi - lo <= opt.angle_tol;
  if (fm < best || (fm == best && std::abs(xm) < std::abs(best_alpha))) {
    best = fm;
    best_alpha = xm;
  }
  fit.distance = best;
  fit.angle = torus_project(best_alpha, m);
  return fit;
}

}  // namespace kelvin
