#pragma once

// Second variation of the energy at a Kelvin wave for boundary graphs
// r = R(eta) + h(eta).  With q = J0 h, J0 = R, and the mass and impulse held
// fixed,
//   E[omega_h] - E[omega*] = (1/2) <q, L q> + o(|h|^2),
//   L q = I0 q + int K(eta, eta') q(eta') d eta',
// where I0 = d_r psi / J0 on the boundary and K = (1/2pi) ln(1/|x - x'|).

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/field.hpp"
#include "kelvin/vstate.hpp"

namespace kelvin {

struct LinearizedOperatorMatrix {
  KelvinWave wave;
  std::vector<double> grid;
  Eigen::VectorXd I0_values;
  Eigen::VectorXd J0_values;
  /// (K q)_i = sum_j kernel(i, j) q_j.
  Eigen::MatrixXd kernel;

  int size() const { return static_cast<int>(grid.size()); }
  double weight() const { return two_pi / size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& q) const {
    return I0_values.cwiseProduct(q) + kernel * q;
  }

  /// Trapezoid L2 inner product on the grid.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return weight() * a.dot(b); }

  /// (1/2) <q, L q>.
  double quadratic_form(const Eigen::VectorXd& q) const { return 0.5 * inner(q, apply(q)); }
};

inline LinearizedOperatorMatrix assemble_linearized(const KelvinWave& w, int n) {
  if (n < 64 || n % 2 != 0) throw InvalidArgument("grid size must be even and at least 64");
  if (!(w.residual <= 1e-8)) throw InvalidArgument("wave is not converged");
  LinearizedOperatorMatrix L;
  L.wave = w;
  L.grid.resize(n);
  std::vector<Point> z(n), dz(n);
  for (int j = 0; j < n; ++j) {
    const double t = two_pi * j / n;
    L.grid[j] = t;
    const double r = w.radius(t);
    z[j] = r * unit(t);
    dz[j] = Point(w.boundary.radius_derivative(t), r) * unit(t);
  }
  const SampledCurve s(std::move(z), std::move(dz));
  const auto field = node_field(s, false);
  L.I0_values.resize(n);
  L.J0_values.resize(n);
  for (int j = 0; j < n; ++j) {
    const double r = std::abs(s.z[j]);
    // grad G = i u in complex notation.
    const double dr_psi = dot(Point(0.0, 1.0) * field.velocity[j], unit(L.grid[j])) + w.omega * r;
    L.J0_values(j) = r;
    L.I0_values(j) = dr_psi / r;
  }
  std::vector<int> all(n);
  for (int j = 0; j < n; ++j) all[j] = j;
  L.kernel = log_kernel_rows(s, all);
  L.kernel = 0.5 * (L.kernel + L.kernel.transpose()).eval();
  return L;
}

/// Linear conditions <c, q> = 0 and the admissible Fourier modes.
struct ConstraintSet {
  std::vector<Eigen::VectorXd> vectors;
  /// Admit only modes that are multiples of m (m-fold symmetric perturbations).
  bool m_fold = true;
};

/// Mass (1), impulse and moment (cos m eta, sin m eta); without the m-fold
/// restriction the translations (cos eta, sin eta) are also removed.
inline ConstraintSet default_constraints(const LinearizedOperatorMatrix& L, bool m_fold = true) {
  const int n = L.size();
  const int m = L.wave.m;
  ConstraintSet cs;
  cs.m_fold = m_fold;
  auto trig = [&](int k, bool sine) {
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v(j) = sine ? std::sin(k * L.grid[j]) : std::cos(k * L.grid[j]);
    return v;
  };
  cs.vectors.push_back(Eigen::VectorXd::Ones(n));
  cs.vectors.push_back(trig(m, false));
  cs.vectors.push_back(trig(m, true));
  if (!m_fold) {
    cs.vectors.push_back(trig(1, false));
    cs.vectors.push_back(trig(1, true));
  }
  return cs;
}

/// Orthonormal (grid inner product) basis of the admissible subspace.
inline Eigen::MatrixXd admissible_basis(const LinearizedOperatorMatrix& L, const ConstraintSet& cs) {
  const int n = L.size();
  const int m = L.wave.m;
  const double w = L.weight();
  std::vector<Eigen::VectorXd> cols;
  for (int k = 1; k < n / 2; ++k) {
    if (cs.m_fold && k % m != 0) continue;
    Eigen::VectorXd c(n), s(n);
    for (int j = 0; j < n; ++j) {
      c(j) = std::cos(k * L.grid[j]);
      s(j) = std::sin(k * L.grid[j]);
    }
    cols.push_back(c);
    cols.push_back(s);
  }
  Eigen::MatrixXd B(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = cols[k];
  if (!cs.vectors.empty()) {
    Eigen::MatrixXd C(n, static_cast<Eigen::Index>(cs.vectors.size()));
    for (std::size_t k = 0; k < cs.vectors.size(); ++k) C.col(static_cast<Eigen::Index>(k)) = cs.vectors[k];
    const Eigen::MatrixXd gram = w * C.transpose() * C;
    B -= C * gram.completeOrthogonalDecomposition().solve(w * C.transpose() * B);
  }
  const Eigen::MatrixXd G = w * B.transpose() * B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw Error("Gram eigen-solve failed");
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < G.rows(); ++k)
    if (es.eigenvalues()(k) > 1e-10 * top) keep.push_back(k);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) =
        B * es.eigenvectors().col(keep[k]) / std::sqrt(es.eigenvalues()(keep[k]));
  return out;
}

/// W-orthogonal projection of q onto the admissible subspace.
inline Eigen::VectorXd project_admissible(const LinearizedOperatorMatrix& L, const ConstraintSet& cs,
                                          const Eigen::VectorXd& q) {
  const Eigen::MatrixXd B = admissible_basis(L, cs);
  return B * (L.weight() * B.transpose() * q);
}

struct ConstrainedSpectrum {
  /// Descending eigenvalues of <q, L q> restricted to the admissible subspace.
  Eigen::VectorXd eigenvalues;
  /// Grid eigenfunctions (columns), normalised in the grid L2 product.
  Eigen::MatrixXd eigenvectors;
};

inline ConstrainedSpectrum constrained_spectrum(const LinearizedOperatorMatrix& L,
                                                const ConstraintSet& cs) {
  const Eigen::MatrixXd B = admissible_basis(L, cs);
  ConstrainedSpectrum out;
  if (B.cols() == 0) {
    out.eigenvalues.resize(0);
    out.eigenvectors.resize(L.size(), 0);
    return out;
  }
  Eigen::MatrixXd LB = L.kernel * B;
  LB += L.I0_values.asDiagonal() * B;
  Eigen::MatrixXd A = L.weight() * B.transpose() * LB;
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error("constrained eigen-solve failed");
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = B * es.eigenvectors().rowwise().reverse();
  return out;
}

/// Negative values certify strict local maximality of the energy.
inline double constrained_max_eigenvalue(const LinearizedOperatorMatrix& L, const ConstraintSet& cs) {
  const auto sp = constrained_spectrum(L, cs);
  if (sp.eigenvalues.size() == 0) throw Error("admissible subspace is empty");
  return sp.eigenvalues(0);
}

/// Disc limit of the form on e^{i n eta}: -1/(2m) + 1/(2n).
inline double disc_limit_eigenvalue(int m, int n) {
  if (n < 1) throw InvalidArgument("mode number must be positive");
  if (m < 1) throw InvalidArgument("symmetry order must be positive");
  return -0.5 / m + 0.5 / n;
}

namespace detail {

// Mass (1/2) int r^2 and impulse (1/4) int r^4 of a polar graph, trapezoid rule.
inline std::pair<double, double> polar_mass_impulse(const Eigen::VectorXd& r) {
  const double w = two_pi / r.size();
  return {0.5 * w * r.squaredNorm(), 0.25 * w * r.array().pow(4).sum()};
}

}  // namespace detail

struct BruteForceOptions {
  /// Grid for the perturbed contour; 0 uses the grid of h.
  int nodes = 0;
  /// Adjust (c0 + c1 cos m eta) / R so mass and impulse match the wave exactly.
  bool enforce_constraints = true;
};

/// E(omega_h) - E(omega*) with r = R + h on the grid eta_j = 2 pi j / N.
inline double energy_difference_bruteforce(const KelvinWave& w, const Eigen::VectorXd& h,
                                           const BruteForceOptions& opt = {}) {
  const int n = static_cast<int>(h.size());
  if (n < 64) throw InvalidArgument("perturbation grid too coarse");
  if (h.cwiseAbs().maxCoeff() > 0.05) throw InvalidArgument("perturbation too large for the expansion");
  Eigen::VectorXd R(n), cm(n);
  for (int j = 0; j < n; ++j) {
    const double t = two_pi * j / n;
    R(j) = w.radius(t);
    cm(j) = std::cos(w.m * t);
  }
  Eigen::VectorXd r = R + h;
  if (opt.enforce_constraints) {
    const auto [mass0, imp0] = detail::polar_mass_impulse(R);
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    auto radius = [&](const Eigen::Vector2d& cc) {
      return Eigen::VectorXd(R + h + (cc(0) * Eigen::VectorXd::Ones(n) + cc(1) * cm).cwiseQuotient(R));
    };
    for (int it = 0; it < 20; ++it) {
      const auto [ma, im] = detail::polar_mass_impulse(radius(c));
      const Eigen::Vector2d f(ma - mass0, im - imp0);
      if (f.cwiseAbs().maxCoeff() < 1e-16) break;
      Eigen::Matrix2d J;
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d cp = c;
        cp(k) += 1e-7;
        const auto [mp, ip] = detail::polar_mass_impulse(radius(cp));
        J(0, k) = (mp - ma) / 1e-7;
        J(1, k) = (ip - im) / 1e-7;
      }
      c -= J.fullPivLu().solve(f);
    }
    r = radius(c);
  }
  const int nodes = opt.nodes > 0 ? opt.nodes : n;
  auto contour = [&](const Eigen::VectorXd& rad) {
    std::vector<Point> z(n);
    for (int j = 0; j < n; ++j) {
      if (!(rad(j) > 0.0)) throw InvalidBoundary("perturbed radius is not positive");
      z[j] = std::polar(rad(j), two_pi * j / n);
    }
    NodeContour c(std::move(z));
    return nodes == n ? c : NodeContour(spectral::resample(c.nodes(), nodes));
  };
  return energy(contour(r)) - energy(contour(R));
}

/// Random admissible q on the operator grid: modes 2m, 3m, ... up to max_mode
/// with decaying random amplitudes, projected onto the constraints and scaled
/// to sup |q / J0| = eps.  Returns h = q / J0.
inline Eigen::VectorXd random_admissible_perturbation(const LinearizedOperatorMatrix& L,
                                                      const ConstraintSet& cs, double eps,
                                                      std::mt19937_64& rng, int max_mode = 0) {
  const int n = L.size();
  const int m = L.wave.m;
  if (max_mode <= 0) max_mode = 6 * m;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (int k = 2; k <= max_mode && k < n / 2; ++k) {
    if (cs.m_fold && k % m != 0) continue;
    const double a = gauss(rng) / k, b = gauss(rng) / k;
    for (int j = 0; j < n; ++j) q(j) += a * std::cos(k * L.grid[j]) + b * std::sin(k * L.grid[j]);
  }
  q = project_admissible(L, cs, q);
  Eigen::VectorXd h = q.cwiseQuotient(L.J0_values);
  const double sup = h.cwiseAbs().maxCoeff();
  if (sup > 0.0) h *= eps / sup;
  return h;
}

}  // namespace kelvin
