#pragma once

// Radial annulus patch 1_{r1 < |x| < r2} and the second variation of its
// energy.  The relative stream function is
//   psi(r) = G(r) + gauge + C1 r^2,   gauge = -G(0) - C1 r1^2,
// with C1 chosen so that psi(r1) = psi(r2) = 0.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/field.hpp"

namespace kelvin {

struct AnnulusModel {
  double r1 = 0.0;
  double r2 = 0.0;
  double C1 = 0.0;
  double gauge = 0.0;
  double rstar = 0.0;
  double slope_inner = 0.0;
  double slope_outer = 0.0;
};

/// Stream function G of the annulus (G(0) at the centre, radial).
inline double annulus_G(double r1, double r2, double r) {
  auto disc0 = [](double a) { return 0.25 * a * a - 0.5 * a * a * std::log(a); };
  const double g0 = disc0(r2) - disc0(r1);
  if (r <= r1) return g0;
  if (r <= r2) return g0 - (0.25 * (r * r - r1 * r1) - 0.5 * r1 * r1 * std::log(r / r1));
  const double g2 = g0 - (0.25 * (r2 * r2 - r1 * r1) - 0.5 * r1 * r1 * std::log(r2 / r1));
  return g2 - 0.5 * (r2 * r2 - r1 * r1) * std::log(r / r2);
}

inline double annulus_stream(const AnnulusModel& a, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("radius must be non-negative");
  return annulus_G(a.r1, a.r2, r) + a.gauge + a.C1 * r * r;
}

/// Root of psi in (r2, inf) by bracketed bisection.
inline double annulus_critical_radius(const AnnulusModel& a) {
  double lo = a.r2, hi = 2.0 * a.r2;
  for (int k = 0; k < 200 && annulus_stream(a, hi) <= 0.0; ++k) hi *= 2.0;
  if (!(annulus_stream(a, hi) > 0.0)) throw Error("critical radius bracket not found");
  // psi < 0 just outside r2 because the outer slope is negative.
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (annulus_stream(a, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline AnnulusModel build_annulus(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw InvalidArgument("annulus needs 0 < r1 < r2");
  AnnulusModel a;
  a.r1 = r1;
  a.r2 = r2;
  const double d = r2 * r2 - r1 * r1;
  a.C1 = 0.25 - r1 * r1 * std::log(r2 / r1) / (2.0 * d);
  a.gauge = -annulus_G(r1, r2, 0.0) - a.C1 * r1 * r1;
  a.slope_inner = 2.0 * a.C1 * r1;
  a.slope_outer = 2.0 * a.C1 * r2 - d / (2.0 * r2);
  if (!(a.C1 > 0.0) || !(a.slope_outer < 0.0)) throw Error("annulus constants out of the expected range");
  a.rstar = annulus_critical_radius(a);
  return a;
}

/// Q_n with E[perturbed] - E[annulus] = pi eps^2 v^T Q_n v + O(eps^3) for
/// the graphs r = r_i + eps v_i cos(n theta) under fixed mass and impulse.
inline Eigen::Matrix2d mode_quadratic_form(const AnnulusModel& a, int n) {
  if (n < 1) throw InvalidArgument("mode number must be positive");
  const double rho = a.r1 / a.r2;
  Eigen::Matrix2d Q;
  Q(0, 0) = -0.5 * a.r1 * a.slope_inner + a.r1 * a.r1 / (4.0 * n);
  Q(1, 1) = 0.5 * a.r2 * a.slope_outer + a.r2 * a.r2 / (4.0 * n);
  Q(0, 1) = Q(1, 0) = -a.r1 * a.r2 * std::pow(rho, n) / (4.0 * n);
  return Q;
}

inline double mode_max_eigenvalue(const AnnulusModel& a, int n) {
  const Eigen::Matrix2d Q = mode_quadratic_form(a, n);
  const double mean = 0.5 * (Q(0, 0) + Q(1, 1));
  const double dev = std::hypot(0.5 * (Q(0, 0) - Q(1, 1)), Q(0, 1));
  return mean + dev;
}

/// Large-n limit of the diagonal.
inline Eigen::Vector2d mode_limit_diagonal(const AnnulusModel& a) {
  return {-0.5 * a.r1 * a.slope_inner, 0.5 * a.r2 * a.slope_outer};
}

struct CoercivityResult {
  int threshold = 0;
  int n_max = 0;
  /// Bound on max eig Q_n for n > n_max; negative certifies the tail.
  double tail_bound = 0.0;
};

/// Smallest m with max eig Q_n < 0 for every positive multiple n of m;
/// modes up to n_max (default 64 m) are scanned and the rest bounded by
/// max diag limit + (r2^2 + r1 r2) / (4 n_max).
inline CoercivityResult coercivity_threshold(const AnnulusModel& a, int n_max_factor = 64,
                                             int m_limit = 100000) {
  const Eigen::Vector2d lim = mode_limit_diagonal(a);
  const double dmax = lim.maxCoeff();
  for (int m = 1; m <= m_limit; ++m) {
    const int n_max = n_max_factor * m;
    const double tail = dmax + (a.r2 * a.r2 + a.r1 * a.r2) / (4.0 * n_max);
    if (!(tail < 0.0)) continue;
    bool ok = true;
    for (int n = m; n <= n_max && ok; n += m) ok = mode_max_eigenvalue(a, n) < 0.0;
    if (ok) return {m, n_max, tail};
  }
  throw Error("no coercivity threshold below the search limit");
}

/// Graph perturbations h(theta) = sum_k Re(c_k e^{i k theta}) of the inner and
/// outer circles; index k of each list is the mode number.
struct AnnulusPerturbation {
  std::vector<Point> h1;
  std::vector<Point> h2;

  static AnnulusPerturbation single_mode(int n, double v1, double v2) {
    AnnulusPerturbation p;
    p.h1.assign(n + 1, Point{});
    p.h2.assign(n + 1, Point{});
    p.h1[n] = v1;
    p.h2[n] = v2;
    return p;
  }

  static double evaluate(const std::vector<Point>& c, double theta) {
    double v = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      v += (c[k] * unit(static_cast<double>(k) * theta)).real();
    return v;
  }
};

struct AnnulusBruteForceOptions {
  int nodes = 512;
  /// Constant radial offsets on both circles restore the mass and impulse.
  bool enforce_constraints = true;
};

namespace detail {

// Mass and impulse of the region between two polar graphs, trapezoid rule.
inline Eigen::Vector2d annulus_mass_impulse(const Eigen::VectorXd& ri, const Eigen::VectorXd& ro) {
  const double w = two_pi / ri.size();
  const double mass = 0.5 * w * (ro.squaredNorm() - ri.squaredNorm());
  const double imp = 0.25 * w * (ro.array().pow(4).sum() - ri.array().pow(4).sum());
  return {mass, imp};
}

inline NodeContour polar_nodes(const Eigen::VectorXd& r) {
  const int n = static_cast<int>(r.size());
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) z[j] = std::polar(r(j), two_pi * j / n);
  return NodeContour(std::move(z));
}

}  // namespace detail

/// E[perturbed] - E[annulus] by boundary-integral energies of the two-contour patch.
inline double annulus_energy_bruteforce(const AnnulusModel& a, const AnnulusPerturbation& p, double eps,
                                        const AnnulusBruteForceOptions& opt = {}) {
  const int n = opt.nodes;
  if (n < 64) throw InvalidArgument("annulus brute force needs at least 64 nodes");
  Eigen::VectorXd h1(n), h2(n);
  for (int j = 0; j < n; ++j) {
    const double t = two_pi * j / n;
    h1(j) = eps * AnnulusPerturbation::evaluate(p.h1, t);
    h2(j) = eps * AnnulusPerturbation::evaluate(p.h2, t);
  }
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd base1 = a.r1 * one, base2 = a.r2 * one;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  if (opt.enforce_constraints) {
    const Eigen::Vector2d target = detail::annulus_mass_impulse(base1, base2);
    for (int it = 0; it < 30; ++it) {
      const Eigen::Vector2d f =
          detail::annulus_mass_impulse(base1 + h1 + c(0) * one, base2 + h2 + c(1) * one) - target;
      if (f.cwiseAbs().maxCoeff() < 1e-16) break;
      Eigen::Matrix2d J;
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d cp = c;
        cp(k) += 1e-7;
        J.col(k) = (detail::annulus_mass_impulse(base1 + h1 + cp(0) * one, base2 + h2 + cp(1) * one) -
                    target - f) /
                   1e-7;
      }
      c -= J.fullPivLu().solve(f);
    }
  }
  const Eigen::VectorXd ri = base1 + h1 + c(0) * one;
  const Eigen::VectorXd ro = base2 + h2 + c(1) * one;
  if (ri.minCoeff() <= 0.0) throw InvalidBoundary("inner radius is not positive");
  if ((ro - ri).minCoeff() <= 0.0) throw InvalidBoundary("inner boundary crosses the outer boundary");
  auto two = [](const Eigen::VectorXd& in, const Eigen::VectorXd& out) {
    const SignedContour parts[2] = {{detail::polar_nodes(out), 1}, {detail::polar_nodes(in), -1}};
    return energy(parts);
  };
  return two(ri, ro) - two(base1, base2);
}

}  // namespace kelvin
