#include <gtest/gtest.h>

#include <random>

#include "kelvin/spectrum.hpp"

using namespace kelvin;

TEST(Spectrum, DiscLimitIsDiagonalInFourierModes) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.0), 128);
  for (int n : {3, 6, 9, 12}) {
    Eigen::VectorXd v(L.size());
    for (int j = 0; j < L.size(); ++j) v(j) = std::cos(n * L.grid[j]);
    const Eigen::VectorXd Lv = L.apply(v);
    EXPECT_NEAR((Lv - disc_limit_eigenvalue(3, n) * v).cwiseAbs().maxCoeff(), 0.0, 1e-12) << n;
  }
  EXPECT_NEAR(disc_limit_eigenvalue(3, 3), 0.0, 1e-16);
}

TEST(Spectrum, KernelIsSymmetricAndPositive) {
  const auto L = assemble_linearized(solve_kelvin(2, 0.04), 128);
  EXPECT_NEAR((L.kernel - L.kernel.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  Eigen::VectorXd v(L.size());
  for (int j = 0; j < L.size(); ++j) v(j) = std::sin(5 * L.grid[j]) + 0.3 * std::cos(2 * L.grid[j]);
  EXPECT_GT(L.inner(v, L.kernel * v), 0.0);
}

TEST(Spectrum, I0DeviationIsOrderBeta) {
  for (int m : {2, 3, 4}) {
    const double beta = 0.02;
    const auto L = assemble_linearized(solve_kelvin(m, beta), 128);
    const double dev = (L.I0_values.array() + 0.5 / m).abs().maxCoeff();
    EXPECT_LE(dev, 1.2 * (0.5 + 0.5 / m) * beta) << m;
  }
}

TEST(Spectrum, CoerciveOnMFoldSubspaceOnly) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.03), 256);
  EXPECT_LT(constrained_max_eigenvalue(L, default_constraints(L, true)), 0.0);
  EXPECT_GT(constrained_max_eigenvalue(L, default_constraints(L, false)), 0.0);
}

TEST(Spectrum, GridConvergence) {
  const auto w = solve_kelvin(4, 0.02);
  const auto a = assemble_linearized(w, 128), b = assemble_linearized(w, 256);
  EXPECT_NEAR(constrained_max_eigenvalue(a, default_constraints(a)),
              constrained_max_eigenvalue(b, default_constraints(b)), 1e-8);
}

TEST(Spectrum, AdmissibleBasisIsOrthonormalAndConstrained) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.02), 128);
  const auto cs = default_constraints(L);
  const Eigen::MatrixXd B = admissible_basis(L, cs);
  const Eigen::MatrixXd G = L.weight() * B.transpose() * B;
  EXPECT_NEAR((G - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  for (const auto& c : cs.vectors) EXPECT_NEAR((c.transpose() * B).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  const Eigen::VectorXd q = project_admissible(L, cs, Eigen::VectorXd::Ones(L.size()));
  EXPECT_NEAR(q.cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Spectrum, EigenvectorsReproduceEigenvalues) {
  const auto L = assemble_linearized(solve_kelvin(2, 0.03), 128);
  const auto sp = constrained_spectrum(L, default_constraints(L));
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd v = sp.eigenvectors.col(k);
    EXPECT_NEAR(L.inner(v, v), 1.0, 1e-10);
    EXPECT_NEAR(2.0 * L.quadratic_form(v), sp.eigenvalues(k), 1e-10);
  }
  for (Eigen::Index k = 1; k < sp.eigenvalues.size(); ++k) EXPECT_LE(sp.eigenvalues(k), sp.eigenvalues(k - 1));
}

TEST(Spectrum, BruteForceMatchesQuadraticForm) {
  std::mt19937_64 rng(7);
  const auto w = solve_kelvin(3, 0.05);
  const auto L = assemble_linearized(w, 128);
  const auto cs = default_constraints(L);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd h = random_admissible_perturbation(L, cs, 1e-3, rng);
    EXPECT_NEAR(h.cwiseAbs().maxCoeff(), 1e-3, 1e-15);
    const double form = L.quadratic_form(L.J0_values.cwiseProduct(h));
    EXPECT_LT(form, 0.0);
    EXPECT_NEAR(energy_difference_bruteforce(w, h) / form, 1.0, 0.02);
  }
}

TEST(Spectrum, BruteForceIsQuadraticInAmplitude) {
  std::mt19937_64 rng(11);
  const auto w = solve_kelvin(2, 0.05);
  const auto L = assemble_linearized(w, 128);
  const Eigen::VectorXd h = random_admissible_perturbation(L, default_constraints(L), 1e-3, rng);
  const double e1 = energy_difference_bruteforce(w, h), e2 = energy_difference_bruteforce(w, 2.0 * h);
  EXPECT_NEAR(e2 / e1, 4.0, 0.05);
}

TEST(Spectrum, RejectsBadArguments) {
  const auto w = solve_kelvin(3, 0.02);
  EXPECT_THROW(assemble_linearized(w, 32), InvalidArgument);
  EXPECT_THROW(assemble_linearized(w, 129), InvalidArgument);
  auto bad = w;
  bad.residual = 1e-3;
  EXPECT_THROW(assemble_linearized(bad, 128), InvalidArgument);
  EXPECT_THROW(energy_difference_bruteforce(w, Eigen::VectorXd::Constant(128, 0.1)), InvalidArgument);
  EXPECT_THROW(energy_difference_bruteforce(w, Eigen::VectorXd::Zero(32)), InvalidArgument);
  EXPECT_THROW(disc_limit_eigenvalue(3, 0), InvalidArgument);
}

TEST(SpectrumCases, I0DeviationAtBetaFiveHundredths) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.05), 256);
  EXPECT_LE((L.I0_values.array() + 1.0 / 6.0).abs().maxCoeff(), 1.2 * (0.5 + 1.0 / 6.0) * 0.05);
}

TEST(SpectrumCases, MaxEigenvalueValues) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.02), 256);
  const double mfold = constrained_max_eigenvalue(L, default_constraints(L, true));
  EXPECT_LE(mfold, -0.02);
  EXPECT_NEAR(mfold, -1.0 / 12.0, 0.01);
  const double all = constrained_max_eigenvalue(L, default_constraints(L, false));
  EXPECT_NEAR(all, 1.0 / 12.0, 0.01);
}

TEST(SpectrumCases, ConstraintModeIsProjectedAway) {
  const auto L = assemble_linearized(solve_kelvin(3, 0.02), 128);
  Eigen::VectorXd q(L.size());
  for (int j = 0; j < L.size(); ++j) q(j) = std::cos(3 * L.grid[j]);
  EXPECT_LT(project_admissible(L, default_constraints(L), q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectrumCases, DiscLimitValues) {
  EXPECT_EQ(disc_limit_eigenvalue(3, 3), 0.0);
  EXPECT_NEAR(disc_limit_eigenvalue(3, 6), -1.0 / 12.0, 1e-16);
  EXPECT_NEAR(disc_limit_eigenvalue(2, 4), -1.0 / 8.0, 1e-16);
}

TEST(SpectrumCases, BruteForceZeroAndSign) {
  const auto w = solve_kelvin(3, 0.02);
  EXPECT_EQ(energy_difference_bruteforce(w, Eigen::VectorXd::Zero(128)), 0.0);
  const auto L = assemble_linearized(w, 128);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 3; ++k)
    EXPECT_LT(energy_difference_bruteforce(w, random_admissible_perturbation(L, default_constraints(L), 1e-3, rng)),
              0.0);
}

TEST(SpectrumCases, CosTwoMModeMatchesForm) {
  const auto w = solve_kelvin(3, 0.02);
  const auto L = assemble_linearized(w, 256);
  Eigen::VectorXd h(L.size());
  for (int j = 0; j < L.size(); ++j) h(j) = 1e-3 * std::cos(6 * L.grid[j]) / L.J0_values(j);
  const double form = L.quadratic_form(L.J0_values.cwiseProduct(h));
  const double brute = energy_difference_bruteforce(w, h);
  EXPECT_NEAR(brute / form, 1.0, 0.1);
  // Disc-limit size of the form: (1/2) * pi * eps^2 * (-1/12), since <cos, cos> = pi.
  EXPECT_NEAR(form / (0.5 * pi * 1e-6 * (-1.0 / 12.0)), 1.0, 0.1);
}

TEST(SpectrumCases, OperatorIsSymmetric) {
  const auto L = assemble_linearized(solve_kelvin(4, 0.02), 128);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd p(L.size()), q(L.size());
  for (int j = 0; j < L.size(); ++j) {
    p(j) = g(rng);
    q(j) = g(rng);
  }
  EXPECT_LT(std::abs(L.inner(L.apply(p), q) - L.inner(p, L.apply(q))), 1e-10);
}

TEST(SpectrumCases, CoerciveAcrossGridAndConvergedUnderDoubling) {
  for (int m : {2, 3, 4})
    for (double beta : {0.01, 0.02, 0.05}) {
      const auto w = solve_kelvin(m, beta);
      const auto a = assemble_linearized(w, 128), b = assemble_linearized(w, 256);
      const double ea = constrained_max_eigenvalue(a, default_constraints(a));
      const double eb = constrained_max_eigenvalue(b, default_constraints(b));
      EXPECT_LT(eb, 0.0);
      EXPECT_NEAR(ea, eb, 1e-8);
    }
}

TEST(SpectrumCases, LowModesBreakCoercivityForLargerM) {
  for (int m : {3, 4}) {
    const auto L = assemble_linearized(solve_kelvin(m, 0.02), 128);
    EXPECT_GT(constrained_max_eigenvalue(L, default_constraints(L, false)), 0.0);
  }
}
