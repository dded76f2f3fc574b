#pragma once

// Stream function G = (-Delta)^{-1} 1_A, velocity u = -grad^perp G and the
// energy E = (1/2) <1_A, G 1_A> of a uniform patch, all reduced to boundary
// integrals.  Targets on the boundary nodes use the Kress splitting
//   ln|x(t) - x(s)| = (1/2) ln(4 sin^2((t - s)/2)) + smooth,
// which keeps the quadrature spectrally accurate for smooth contours.
//
//   G(x) = (1/2pi) oint (1/4 - (1/2) ln|y - x|) (y - x) x dy
//   u(x) = -(1/2pi) oint ln|y - x| dy
//   E    = (1/16pi) oint oint rho^2 (ln rho - 1) dx . dy,   rho = |x - y|

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/spectral.hpp"

namespace kelvin {

struct FieldSample {
  Point point{};
  double stream = 0.0;
  Point velocity{};
  /// Target on or extremely close to the boundary: stream is the continuous
  /// extension, velocity the boundary limit, accuracy reduced.
  bool reduced_accuracy = false;
};

namespace detail {

inline double log_abs(Point d) { return 0.5 * std::log(std::norm(d)); }

}  // namespace detail

/// Stream and velocity at every node of a sampled curve.
struct NodeField {
  std::vector<double> stream;
  std::vector<Point> velocity;
};

inline NodeField node_field(const SampledCurve& s, bool with_stream = true) {
  const int n = static_cast<int>(s.size());
  const auto table = spectral::KressTable::get(n);
  const double w = s.weight();
  const auto& R = table->weights;
  const auto& ls = table->log_half_sin;

  // Pairwise log sums; each log is shared by (i, j) and (j, i).
  std::vector<Point> log_dz(n, Point{});
  std::vector<double> log_phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Point zi = s.z[i];
    const Point dzi = s.dz[i];
    Point acc_u{};
    double acc_g = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const Point d = s.z[j] - zi;
      const double l = detail::log_abs(d);
      acc_u += l * s.dz[j];
      log_dz[j] += l * dzi;
      if (with_stream) {
        acc_g += l * cross(d, s.dz[j]);
        log_phi[j] += l * cross(-d, dzi);
      }
    }
    log_dz[i] += acc_u;
    log_phi[i] += acc_g;
  }

  auto conv_r = spectral::circular_convolve(R, s.dz);
  auto conv_ls = spectral::circular_convolve(ls, s.dz);

  NodeField out;
  out.velocity.resize(n);
  for (int i = 0; i < n; ++i) {
    const Point smooth = log_dz[i] - conv_ls[i] + std::log(std::abs(s.dz[i])) * s.dz[i];
    out.velocity[i] = -(0.5 * conv_r[i] + w * smooth) / two_pi;
  }
  if (!with_stream) return out;

  std::vector<Point> cz(n);
  double sum_c = 0.0;
  Point sum_dz{};
  for (int j = 0; j < n; ++j) {
    cz[j] = cross(s.z[j], s.dz[j]);
    sum_c += cz[j].real();
    sum_dz += s.dz[j];
  }
  auto conv_r_c = spectral::circular_convolve(R, cz);
  auto conv_ls_c = spectral::circular_convolve(ls, cz);
  out.stream.resize(n);
  for (int i = 0; i < n; ++i) {
    // phi_ij = cross(z_j, z'_j) - cross(z_i, z'_j)
    const double zi_r = conv_r_c[i].real() - cross(s.z[i], conv_r[i]);
    const double zi_ls = conv_ls_c[i].real() - cross(s.z[i], conv_ls[i]);
    const double plain = sum_c - cross(s.z[i], sum_dz);
    const double log_part = 0.5 * zi_r + w * (log_phi[i] - zi_ls);
    out.stream[i] = (0.25 * w * plain - 0.5 * log_part) / two_pi;
  }
  return out;
}

inline NodeField node_field(const NodeContour& c, bool with_stream = true) {
  return node_field(SampledCurve(c), with_stream);
}

/// Rows of the single-layer operator (1/2pi) int ln(1/|x_i - y(t)|) f(t) dt at
/// the listed boundary nodes, discretised with Kress weights:
///   (K f)_i = sum_j M(i, j) f_j.
inline Eigen::MatrixXd log_kernel_rows(const SampledCurve& s, std::span<const int> targets) {
  const int n = static_cast<int>(s.size());
  const auto table = spectral::KressTable::get(n);
  const double w = s.weight();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(targets.size()), n);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const int i = targets[r];
    for (int j = 0; j < n; ++j) {
      const int k = ((i - j) % n + n) % n;
      const double smooth = j == i ? std::log(std::abs(s.dz[i]))
                                   : detail::log_abs(s.z[j] - s.z[i]) - table->log_half_sin[k];
      M(static_cast<Eigen::Index>(r), j) = -(0.5 * table->weights[k] + w * smooth) / two_pi;
    }
  }
  return M;
}

/// Off-boundary field evaluation with adaptive spectral refinement: targets
/// within a few node spacings of the curve are integrated on an upsampled copy.
class PatchField {
 public:
  static constexpr int max_refine = 64;

  explicit PatchField(const NodeContour& c) : base_(c), levels_() {
    levels_.push_back(std::make_shared<SampledCurve>(c));
    spacing_ = c.max_node_spacing();
  }

  FieldSample sample(Point x) const {
    FieldSample out;
    out.point = x;
    const auto& s0 = *levels_.front();
    int nearest = 0;
    double dmin = INFINITY;
    for (std::size_t j = 0; j < s0.size(); ++j) {
      const double d = std::abs(s0.z[j] - x);
      if (d < dmin) {
        dmin = d;
        nearest = static_cast<int>(j);
      }
    }
    if (dmin <= 1e-12 * (1.0 + std::abs(x))) {
      on_node(nearest, out);
      return out;
    }
    int factor = 1;
    while (factor < max_refine && dmin < 6.0 * spacing_ / factor) factor *= 2;
    if (dmin < 6.0 * spacing_ / factor) out.reduced_accuracy = true;
    const auto& s = level(factor);
    const double w = s.weight();
    double g = 0.0;
    Point u{};
    for (std::size_t j = 0; j < s.size(); ++j) {
      const Point d = s.z[j] - x;
      const double l = detail::log_abs(d);
      g += (0.25 - 0.5 * l) * cross(d, s.dz[j]);
      u += l * s.dz[j];
    }
    out.stream = g * w / two_pi;
    out.velocity = -u * w / two_pi;
    return out;
  }

  double stream(Point x) const { return sample(x).stream; }
  Point velocity(Point x) const { return sample(x).velocity; }

  std::vector<FieldSample> sample(std::span<const Point> xs) const {
    std::vector<FieldSample> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(sample(x));
    return out;
  }

 private:
  const SampledCurve& level(int factor) const {
    int idx = 0;
    for (int f = 1; f < factor; f *= 2) ++idx;
    while (static_cast<int>(levels_.size()) <= idx) {
      const int f = 1 << levels_.size();
      auto z = spectral::resample(base_.nodes(), static_cast<int>(base_.size()) * f);
      auto dz = spectral::derivative(z);
      levels_.push_back(std::make_shared<SampledCurve>(std::move(z), std::move(dz)));
    }
    return *levels_[idx];
  }

  void on_node(int i, FieldSample& out) const {
    const auto& s = *levels_.front();
    const int idx[1] = {i};
    const Eigen::MatrixXd M = log_kernel_rows(s, idx);
    const int n = static_cast<int>(s.size());
    double plain = 0.0, logp = 0.0;
    Point u{};
    for (int j = 0; j < n; ++j) {
      const double phi = cross(s.z[j] - s.z[i], s.dz[j]);
      plain += phi;
      logp += M(0, j) * phi;
      u += M(0, j) * s.dz[j];
    }
    // G = (1/2pi)(w/4) sum phi + (1/2) K[phi];  u = K[z'] with K the single layer.
    out.stream = 0.25 * plain * s.weight() / two_pi + 0.5 * logp;
    out.velocity = u;
    out.reduced_accuracy = true;
  }

  NodeContour base_;
  mutable std::vector<std::shared_ptr<SampledCurve>> levels_;
  double spacing_ = 0.0;
};

inline double stream_at(const NodeContour& c, Point x) { return PatchField(c).stream(x); }
inline Point velocity_at(const NodeContour& c, Point x) { return PatchField(c).velocity(x); }
inline FieldSample sample_at(const NodeContour& c, Point x) { return PatchField(c).sample(x); }

/// A boundary component with sign +1 (outer) or -1 (hole); all stored CCW.
struct SignedContour {
  NodeContour contour;
  int sign = 1;
};

namespace detail {

// oint oint rho^2 (ln rho - 1) dx.dy over one smooth closed curve.
inline double self_energy_integral(const SampledCurve& s) {
  const int n = static_cast<int>(s.size());
  const auto table = spectral::KressTable::get(n);
  const double w = s.weight();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double kress = 0.0, smooth = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Point d = s.z[j] - s.z[i];
      const double rho2 = std::norm(d);
      const double f = rho2 * dot(s.dz[i], s.dz[j]);
      const int k = ((i - j) % n + n) % n;
      kress += table->weights[k] * f;
      smooth += f * (0.5 * std::log(rho2) - table->log_half_sin[k] - 1.0);
    }
    total += 0.5 * kress + w * smooth;
  }
  return total * w;
}

inline double cross_energy_integral(const SampledCurve& a, const SampledCurve& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double rho2 = std::norm(b.z[j] - a.z[i]);
      total += rho2 * (0.5 * std::log(rho2) - 1.0) * dot(a.dz[i], b.dz[j]);
    }
  return total * a.weight() * b.weight();
}

}  // namespace detail

/// E = (1/4 pi) int_A int_A ln(1/|x - y|) dx dy for a simply connected patch.
inline double energy(const NodeContour& c) {
  return detail::self_energy_integral(SampledCurve(c)) / (16.0 * pi);
}

/// Energy of a multiply connected patch given by signed boundary components.
inline double energy(std::span<const SignedContour> parts) {
  std::vector<SampledCurve> curves;
  curves.reserve(parts.size());
  for (const auto& p : parts) curves.emplace_back(p.contour);
  double total = 0.0;
  for (std::size_t a = 0; a < parts.size(); ++a) {
    total += detail::self_energy_integral(curves[a]);
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      total += 2.0 * parts[a].sign * parts[b].sign *
               detail::cross_energy_integral(curves[a], curves[b]);
  }
  return total / (16.0 * pi);
}

/// Closed-form field of the disc of radius r0 centred at the origin.
inline FieldSample disc_oracle(double r0, Point x) {
  if (!(r0 > 0.0)) throw InvalidArgument("disc radius must be positive");
  FieldSample out;
  out.point = x;
  const double r = std::abs(x);
  const double r02 = r0 * r0;
  double utheta;
  if (r <= r0) {
    out.stream = 0.25 * (r02 - r02 * std::log(r02) - r * r);
    utheta = 0.5 * r;
  } else {
    out.stream = -0.5 * r02 * std::log(r);
    utheta = r02 / (2.0 * r);
  }
  out.velocity = r > 0.0 ? Point(0.0, utheta) * (x / r) : Point{};
  return out;
}

}  // namespace kelvin
