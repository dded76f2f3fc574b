#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kelvin/core.hpp"
#include "kelvin/spectral.hpp"

namespace kelvin {

/// Closed patch boundary sampled by ordered nodes; node n-1 connects back to
/// node 0.  The nodes are read as samples of a smooth curve at equispaced
/// parameter values, which is what the spectral quadratures assume.
class NodeContour {
 public:
  static constexpr double min_spacing = 1e-12;

  NodeContour() = default;

  /// Checks node count, spacing and counter-clockwise orientation.
  explicit NodeContour(std::vector<Point> nodes) : nodes_(std::move(nodes)) {
    validate();
  }

  /// Accepts either orientation and stores the nodes counter-clockwise.
  static NodeContour any_orientation(std::vector<Point> nodes) {
    if (signed_shoelace(nodes) < 0.0) std::reverse(nodes.begin() + 1, nodes.end());
    return NodeContour(std::move(nodes));
  }

  /// Also rejects self-intersecting polygons; O(n^2).
  static NodeContour checked(std::vector<Point> nodes) {
    NodeContour c(std::move(nodes));
    if (!c.is_simple()) throw InvalidContour("contour is self-intersecting");
    return c;
  }

  std::span<const Point> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Point& operator[](std::size_t i) const noexcept { return nodes_[i]; }
  auto begin() const noexcept { return nodes_.begin(); }
  auto end() const noexcept { return nodes_.end(); }

  double min_node_spacing() const {
    double h = INFINITY;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      h = std::min(h, std::abs(nodes_[(i + 1) % nodes_.size()] - nodes_[i]));
    return h;
  }

  double max_node_spacing() const {
    double h = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      h = std::max(h, std::abs(nodes_[(i + 1) % nodes_.size()] - nodes_[i]));
    return h;
  }

  bool is_simple() const {
    const std::size_t n = nodes_.size();
    auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = nodes_[i], b = nodes_[(i + 1) % n];
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const Point c = nodes_[j], d = nodes_[(j + 1) % n];
        if (std::max(a.real(), b.real()) < std::min(c.real(), d.real()) ||
            std::max(c.real(), d.real()) < std::min(a.real(), b.real()) ||
            std::max(a.imag(), b.imag()) < std::min(c.imag(), d.imag()) ||
            std::max(c.imag(), d.imag()) < std::min(a.imag(), b.imag()))
          continue;
        const double o1 = orient(a, b, c), o2 = orient(a, b, d);
        const double o3 = orient(c, d, a), o4 = orient(c, d, b);
        if (o1 * o2 < 0.0 && o3 * o4 < 0.0) return false;
      }
    }
    return true;
  }

  static double signed_shoelace(std::span<const Point> z) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += cross(z[i], z[(i + 1) % z.size()]);
    return 0.5 * s;
  }

 private:
  void validate() const {
    if (nodes_.size() < 3) throw InvalidContour("contour needs at least 3 nodes");
    double scale = 0.0;
    for (const auto& p : nodes_) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
        throw InvalidContour("contour has a non-finite node");
      scale = std::max(scale, std::abs(p));
    }
    if (min_node_spacing() <= min_spacing)
      throw InvalidContour("consecutive contour nodes coincide");
    if (signed_shoelace(nodes_) < -1e-14 * std::max(1.0, scale * scale))
      throw InvalidContour("contour must be counter-clockwise");
  }

  std::vector<Point> nodes_;
};

/// Star-shaped boundary r(theta) = r0 + sum_k a_k cos(k m theta).
struct FourierBoundary {
  double r0 = 1.0;
  int m = 2;
  std::vector<double> coeffs;

  double radius(double theta) const {
    double r = r0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      r += coeffs[k] * std::cos(static_cast<double>((k + 1) * m) * theta);
    return r;
  }

  double radius_derivative(double theta) const {
    double dr = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const double f = static_cast<double>((k + 1) * m);
      dr -= f * coeffs[k] * std::sin(f * theta);
    }
    return dr;
  }
};

/// Nodes at theta_j = 2 pi j / n, r_j = r0 + g(theta_j).
inline NodeContour fourier_to_contour(const FourierBoundary& fb, int n) {
  if (n < 16) throw InvalidArgument("fourier_to_contour needs at least 16 nodes");
  if (fb.m < 1) throw InvalidArgument("symmetry order must be positive");
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) {
    const double theta = two_pi * j / n;
    const double r = fb.radius(theta);
    if (!(r > 0.0)) throw InvalidBoundary("boundary radius is not positive");
    z[j] = std::polar(r, theta);
  }
  return NodeContour(std::move(z));
}

/// Recover a_1..a_K from a contour whose nodes sit at theta_j = 2 pi j / n.
inline FourierBoundary fit_fourier(const NodeContour& c, int m, int modes) {
  const int n = static_cast<int>(c.size());
  FourierBoundary fb;
  fb.m = m;
  double mean = 0.0;
  for (int j = 0; j < n; ++j) mean += std::abs(c[j]);
  fb.r0 = mean / n;
  fb.coeffs.assign(modes, 0.0);
  for (int k = 1; k <= modes; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(c[j]) * std::cos(k * m * two_pi * j / n);
    fb.coeffs[k - 1] = 2.0 * s / n;
  }
  return fb;
}

/// Polar graph r < f(theta) sampled at n equispaced angles.
template <class RadiusFn>
NodeContour polar_contour(RadiusFn&& radius, int n) {
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) {
    const double theta = two_pi * j / n;
    const double r = radius(theta);
    if (!(r > 0.0)) throw InvalidBoundary("boundary radius is not positive");
    z[j] = std::polar(r, theta);
  }
  return NodeContour(std::move(z));
}

inline NodeContour circle(double radius, int n, Point center = {}) {
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) z[j] = center + std::polar(radius, two_pi * j / n);
  return NodeContour(std::move(z));
}

/// Spectrally refined copy with factor * n nodes.
inline NodeContour refine(const NodeContour& c, int factor) {
  if (factor <= 1) return c;
  return NodeContour(spectral::resample(c.nodes(), static_cast<int>(c.size()) * factor));
}

/// Nodes plus their parameter derivatives dz/dt, t in [0, 2 pi).
struct SampledCurve {
  std::vector<Point> z;
  std::vector<Point> dz;

  explicit SampledCurve(const NodeContour& c)
      : z(c.begin(), c.end()), dz(spectral::derivative(c.nodes())) {}
  SampledCurve(std::vector<Point> nodes, std::vector<Point> derivs)
      : z(std::move(nodes)), dz(std::move(derivs)) {}

  std::size_t size() const noexcept { return z.size(); }
  double weight() const noexcept { return two_pi / static_cast<double>(z.size()); }
};

}  // namespace kelvin
