#pragma once

// Uniformly rotating m-fold patches bifurcating from the unit disc.
//
// The boundary is r(theta) = 1 + beta cos(m theta) + sum_{k>=2} a_k cos(k m theta)
// and the unknowns (a_2..a_K, Omega, C) are fitted so that the relative stream
// function psi = G[1_A] + Omega r^2 / 2 + C vanishes on the boundary.  By the
// even m-fold symmetry only nodes with theta in [0, pi/m] are collocated.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/field.hpp"

namespace kelvin {

struct KelvinWave {
  int m = 2;
  double beta = 0.0;
  FourierBoundary boundary;
  double omega = 0.0;
  /// Gauge C of the relative stream function.
  double gauge = 0.0;
  /// max |psi| over the collocation nodes at convergence.
  double residual = 0.0;
  int iterations = 0;
  int collocation = 0;

  NodeContour contour(int n) const { return fourier_to_contour(boundary, n); }
  double radius(double theta) const { return boundary.radius(theta); }
};

struct KelvinSolverOptions {
  int modes = 16;
  /// Total boundary nodes; 0 picks 8 m K rounded to a multiple of 2m.
  int collocation = 0;
  double tol = 1e-10;
  int max_iterations = 25;
  bool analytic_jacobian = true;
};

/// Leading-order angular velocity 1/2 - 1/(2m).
inline double kelvin_limit_omega(int m) { return 0.5 - 0.5 / m; }

namespace detail {

struct VStateSystem {
  int m;
  double beta;
  int modes;
  int n;
  std::vector<int> targets;

  VStateSystem(int m_, double beta_, int modes_, int n_) : m(m_), beta(beta_), modes(modes_), n(n_) {
    for (int i = 0; i <= n / (2 * m); ++i) targets.push_back(i);
  }

  int unknowns() const { return modes + 1; }  // a_2..a_K, Omega, C

  FourierBoundary boundary(const Eigen::VectorXd& x) const {
    FourierBoundary fb;
    fb.r0 = 1.0;
    fb.m = m;
    fb.coeffs.assign(modes, 0.0);
    fb.coeffs[0] = beta;
    for (int k = 2; k <= modes; ++k) fb.coeffs[k - 1] = x(k - 2);
    return fb;
  }

  SampledCurve curve(const FourierBoundary& fb) const {
    std::vector<Point> z(n), dz(n);
    for (int j = 0; j < n; ++j) {
      const double t = two_pi * j / n;
      const double r = fb.radius(t);
      if (!(r > 0.0)) throw InvalidBoundary("V-state iterate has non-positive radius");
      const Point e = unit(t);
      z[j] = r * e;
      dz[j] = Point(fb.radius_derivative(t), r) * e;
    }
    return SampledCurve(std::move(z), std::move(dz));
  }

  // Residual at the target nodes; optionally the Jacobian.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const {
    const double omega = x(modes - 1);
    const double c = x(modes);
    const auto fb = boundary(x);
    const auto s = curve(fb);
    const Eigen::MatrixXd M = log_kernel_rows(s, targets);
    const int nt = static_cast<int>(targets.size());
    Eigen::VectorXd res(nt);
    std::vector<Point> vel(nt);
    for (int r = 0; r < nt; ++r) {
      const int i = targets[r];
      double plain = 0.0, logp = 0.0;
      Point u{};
      for (int j = 0; j < n; ++j) {
        const double phi = cross(s.z[j] - s.z[i], s.dz[j]);
        plain += phi;
        logp += M(r, j) * phi;
        u += M(r, j) * s.dz[j];
      }
      const double g = 0.25 * plain * s.weight() / two_pi + 0.5 * logp;
      res(r) = g + 0.5 * omega * std::norm(s.z[i]) + c;
      vel[r] = u;
    }
    if (jac) {
      jac->resize(nt, unknowns());
      Eigen::VectorXd density(n);
      for (int k = 2; k <= modes; ++k) {
        for (int j = 0; j < n; ++j)
          density(j) = std::cos(k * m * two_pi * j / n) * std::abs(s.z[j]);
        const Eigen::VectorXd dg = M * density;
        for (int r = 0; r < nt; ++r) {
          const int i = targets[r];
          const double t = two_pi * i / n;
          // grad G = i u; radial component plus the rotating-frame term
          const double dr_psi =
              dot(Point(0.0, 1.0) * vel[r], unit(t)) + omega * std::abs(s.z[i]);
          (*jac)(r, k - 2) = dr_psi * std::cos(k * m * t) + dg(r);
        }
      }
      for (int r = 0; r < nt; ++r) {
        (*jac)(r, modes - 1) = 0.5 * std::norm(s.z[targets[r]]);
        (*jac)(r, modes) = 1.0;
      }
    }
    return res;
  }

  Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd r0 = evaluate(x, nullptr);
    Eigen::MatrixXd J(r0.size(), unknowns());
    for (int k = 0; k < unknowns(); ++k) {
      Eigen::VectorXd xp = x;
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      xp(k) += h;
      J.col(k) = (evaluate(xp, nullptr) - r0) / h;
    }
    return J;
  }
};

inline int default_collocation(int m, int modes) {
  const int block = 2 * m;
  const int target = 8 * m * modes;
  return ((target + block - 1) / block) * block;
}

}  // namespace detail

/// Newton (Gauss-Newton on the overdetermined half-period collocation) with
/// step halving.  a_1 = beta is held fixed.
inline KelvinWave solve_kelvin(int m, double beta, const KelvinSolverOptions& opt = {},
                               const KelvinWave* warm_start = nullptr) {
  if (m < 2) throw InvalidArgument("solve_kelvin requires m >= 2");
  if (!(beta >= 0.0)) throw InvalidArgument("solve_kelvin requires beta >= 0");
  if (opt.modes < 4) throw InvalidArgument("solve_kelvin requires at least 4 modes");
  const int n = opt.collocation > 0 ? opt.collocation : detail::default_collocation(m, opt.modes);
  if (n < 8 * m * opt.modes || n % (2 * m) != 0)
    throw InvalidArgument("collocation must be a multiple of 2m and at least 8 m K");

  detail::VStateSystem sys(m, beta, opt.modes, n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.unknowns());
  const double omega0 = kelvin_limit_omega(m);
  x(opt.modes - 1) = omega0;
  x(opt.modes) = -0.5 * omega0;
  if (warm_start && warm_start->m == m) {
    const auto& a = warm_start->boundary.coeffs;
    for (int k = 2; k <= opt.modes && k <= static_cast<int>(a.size()); ++k) x(k - 2) = a[k - 1];
    x(opt.modes - 1) = warm_start->omega;
    x(opt.modes) = warm_start->gauge;
  }

  Eigen::MatrixXd J;
  Eigen::VectorXd r = sys.evaluate(x, opt.analytic_jacobian ? &J : nullptr);
  double rnorm = r.cwiseAbs().maxCoeff();
  int it = 0;
  while (rnorm >= opt.tol) {
    if (it >= opt.max_iterations)
      throw NonConvergence("V-state Newton iteration did not converge", rnorm);
    if (!opt.analytic_jacobian) J = sys.fd_jacobian(x);
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    Eigen::VectorXd xn;
    Eigen::VectorXd rn;
    Eigen::MatrixXd Jn;
    double rn_norm = INFINITY;
    for (int halving = 0; halving < 12; ++halving) {
      xn = x + lambda * step;
      try {
        rn = sys.evaluate(xn, opt.analytic_jacobian ? &Jn : nullptr);
        rn_norm = rn.cwiseAbs().maxCoeff();
      } catch (const InvalidBoundary&) {
        rn_norm = INFINITY;
      }
      if (rn_norm < rnorm) break;
      lambda *= 0.5;
    }
    ++it;
    if (!(rn_norm < rnorm)) {
      // Stagnation at round-off level counts as converged only below tol.
      throw NonConvergence("V-state Newton step failed to reduce the residual", rnorm);
    }
    x = xn;
    r = rn;
    if (opt.analytic_jacobian) J = Jn;
    rnorm = rn_norm;
  }

  KelvinWave w;
  w.m = m;
  w.beta = beta;
  w.boundary = sys.boundary(x);
  w.omega = x(opt.modes - 1);
  w.gauge = x(opt.modes);
  w.residual = rnorm;
  w.iterations = it;
  w.collocation = n;
  return w;
}

/// Off-grid check: psi + C_opt on n_check fresh boundary nodes, with the gauge
/// re-fitted (minimax), so a disc has zero residual for any Omega.
inline double relative_stream_residual(const KelvinWave& w, int n_check) {
  const auto c = w.contour(n_check);
  const auto f = node_field(c);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double v = f.stream[j] + 0.5 * w.omega * std::norm(c[j]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

/// psi(x) = G(x) + Omega |x|^2 / 2 + C for an already built field evaluator.
inline double relative_stream(const KelvinWave& w, const PatchField& field, Point x) {
  return field.stream(x) + 0.5 * w.omega * std::norm(x) + w.gauge;
}

/// Waves at beta_j = j beta_max / steps, each warm-started from the previous.
inline std::vector<KelvinWave> continuation(int m, double beta_max, int steps,
                                            const KelvinSolverOptions& opt = {}) {
  if (steps < 1) throw InvalidArgument("continuation needs at least one step");
  std::vector<KelvinWave> out;
  out.reserve(steps);
  for (int j = 1; j <= steps; ++j) {
    const double beta = j * beta_max / steps;
    try {
      out.push_back(solve_kelvin(m, beta, opt, out.empty() ? nullptr : &out.back()));
    } catch (const NonConvergence& e) {
      throw NonConvergence("continuation failed at beta = " + std::to_string(beta) + ": " + e.what(),
                           e.residual());
    }
  }
  return out;
}

/// Continuation over an explicit list of amplitudes (any order).
inline std::vector<KelvinWave> continuation(int m, const std::vector<double>& betas,
                                            const KelvinSolverOptions& opt = {}) {
  std::vector<KelvinWave> out;
  for (double beta : betas) out.push_back(solve_kelvin(m, beta, opt, out.empty() ? nullptr : &out.back()));
  return out;
}

/// Zero r* > 1 of the beta -> 0 relative stream -ln(r)/2 + (1/2 - 1/(2m))(r^2 - 1)/2.
inline double critical_radius_kelvin(int m) {
  if (m < 2) throw InvalidArgument("critical_radius_kelvin requires m >= 2");
  const double omega = kelvin_limit_omega(m);
  auto f = [omega](double r) { return -0.5 * std::log(r) + 0.5 * omega * (r * r - 1.0); };
  double lo = 1.0 + 1e-6, hi = 2.0;
  while (f(hi) <= 0.0) hi *= 2.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Classical Kirchhoff ellipse angular velocity ab/(a+b)^2.
inline double kirchhoff_omega(double a, double b) { return a * b / ((a + b) * (a + b)); }

}  // namespace kelvin
