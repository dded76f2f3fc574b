#include <gtest/gtest.h>

#include "kelvin/geometry.hpp"
#include "kelvin/vstate.hpp"

using namespace kelvin;

TEST(VState, ConvergesWithSmallOffGridResidual) {
  for (int m : {2, 3, 4}) {
    const auto w = solve_kelvin(m, 0.05 * 2.0 / m);
    EXPECT_LE(w.residual, 1e-10);
    EXPECT_LT(relative_stream_residual(w, 1000), 1e-9) << m;
    EXPECT_DOUBLE_EQ(w.boundary.coeffs[0], w.beta);
  }
}

TEST(VState, RelativeStreamVanishesOnBoundaryAndIsPositiveInside) {
  const auto w = solve_kelvin(3, 0.05);
  const PatchField f(w.contour(512));
  for (double t : {0.1, 0.9, 2.0}) {
    const Point x = std::polar(w.radius(t), t);
    EXPECT_NEAR(relative_stream(w, f, x * 1.0000001), 0.0, 1e-6);
  }
  EXPECT_GT(relative_stream(w, f, {0.0, 0.0}), 0.0);
  EXPECT_LT(relative_stream(w, f, {1.2, 0.0}), 0.0);
}

TEST(VState, OmegaApproachesLimitQuadratically) {
  const auto w1 = solve_kelvin(3, 0.02), w2 = solve_kelvin(3, 0.04);
  const double d1 = w1.omega - kelvin_limit_omega(3), d2 = w2.omega - kelvin_limit_omega(3);
  EXPECT_NEAR(d2 / d1, 4.0, 0.1);
}

TEST(VState, IsMFoldSymmetricAndEvenInTheta) {
  const auto w = solve_kelvin(4, 0.03);
  EXPECT_TRUE(check_m_fold(w.contour(512), 4));
  for (double t : {0.2, 1.1})
    EXPECT_NEAR(w.radius(t), w.radius(-t), 1e-15);
}

TEST(VState, DiscAtZeroAmplitude) {
  const auto w = solve_kelvin(3, 0.0);
  for (double a : w.boundary.coeffs) EXPECT_EQ(a, 0.0);
  EXPECT_NEAR(w.omega, kelvin_limit_omega(3), 1e-14);
}

TEST(VState, ModeCountIsConverged) {
  KelvinSolverOptions o;
  o.modes = 32;
  EXPECT_NEAR(solve_kelvin(3, 0.05).omega, solve_kelvin(3, 0.05, o).omega, 1e-12);
}

TEST(VState, FiniteDifferenceJacobianAgrees) {
  KelvinSolverOptions o;
  o.analytic_jacobian = false;
  EXPECT_NEAR(solve_kelvin(3, 0.05).omega, solve_kelvin(3, 0.05, o).omega, 1e-11);
}

TEST(VState, ContinuationWarmStartsTheBranch) {
  const auto branch = continuation(2, 0.1, 4);
  ASSERT_EQ(branch.size(), 4u);
  for (std::size_t k = 1; k < branch.size(); ++k) EXPECT_LT(branch[k].omega, branch[k - 1].omega);
  EXPECT_NEAR(branch.back().omega, solve_kelvin(2, 0.1).omega, 1e-12);
  // m = 2 waves are Kirchhoff ellipses.
  const auto& w = branch.back();
  EXPECT_NEAR(w.omega, kirchhoff_omega(w.radius(0), w.radius(pi / 2)), 1e-9);
}

TEST(VState, CriticalRadiusIsZeroOfLimitStream) {
  for (int m : {2, 3, 4, 7}) {
    const double r = critical_radius_kelvin(m);
    EXPECT_GT(r, 1.0);
    EXPECT_NEAR(-0.5 * std::log(r) + 0.5 * kelvin_limit_omega(m) * (r * r - 1), 0.0, 1e-12);
  }
  EXPECT_THROW(critical_radius_kelvin(1), InvalidArgument);
}

TEST(VState, RejectsBadArguments) {
  EXPECT_THROW(solve_kelvin(1, 0.05), InvalidArgument);
  EXPECT_THROW(solve_kelvin(3, -0.1), InvalidArgument);
  KelvinSolverOptions o;
  o.modes = 2;
  EXPECT_THROW(solve_kelvin(3, 0.05, o), InvalidArgument);
  o = {};
  o.collocation = 100;
  EXPECT_THROW(solve_kelvin(3, 0.05, o), InvalidArgument);
  EXPECT_THROW(continuation(3, 0.05, 0), InvalidArgument);
}

TEST(VState, ReportsNonConvergence) {
  KelvinSolverOptions o;
  o.max_iterations = 1;
  EXPECT_THROW(solve_kelvin(2, 0.3, o), NonConvergence);
}

TEST(VStateCases, SmallAmplitudeValues) {
  EXPECT_NEAR(solve_kelvin(3, 1e-3).omega, 1.0 / 3.0, 1e-4);
  const auto w = solve_kelvin(4, 1e-3);
  EXPECT_LT(std::abs(w.boundary.coeffs[1]) / w.beta, 0.05);
}

TEST(VStateCases, ResidualRespondsLinearlyToOmegaError) {
  auto w = solve_kelvin(3, 0.05);
  EXPECT_LT(relative_stream_residual(w, 777), 1e-8);
  const auto c = w.contour(777);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : c) {
    lo = std::min(lo, 0.5 * std::norm(p));
    hi = std::max(hi, 0.5 * std::norm(p));
  }
  w.omega += 1e-3;
  EXPECT_NEAR(relative_stream_residual(w, 777) / (1e-3 * 0.5 * (hi - lo)), 1.0, 0.05);
}

TEST(VStateCases, DiscResidualVanishesForAnyOmega) {
  auto w = solve_kelvin(3, 0.0);
  for (double om : {0.0, 0.2, 1.7}) {
    w.omega = om;
    EXPECT_LT(relative_stream_residual(w, 300), 1e-13);
  }
}

TEST(VStateCases, ContinuationBranch) {
  const auto branch = continuation(3, 0.05, 10);
  ASSERT_EQ(branch.size(), 10u);
  for (const auto& w : branch) {
    EXPECT_LE(w.residual, 1e-10);
    EXPECT_LT(std::abs(w.omega - 1.0 / 3.0), 2.0 * w.beta * w.beta);
  }
  const auto one = continuation(3, 0.05, 1);
  EXPECT_NEAR(one.front().omega, solve_kelvin(3, 0.05).omega, 1e-13);
  // Walking back down the branch reproduces the waves.
  std::vector<double> down;
  for (auto it = branch.rbegin(); it != branch.rend(); ++it) down.push_back(it->beta);
  const auto back = continuation(3, down);
  for (std::size_t k = 0; k < back.size(); ++k) {
    const auto& fwd = branch[branch.size() - 1 - k];
    EXPECT_NEAR(back[k].omega, fwd.omega, 1e-9);
    for (std::size_t j = 0; j < fwd.boundary.coeffs.size(); ++j)
      EXPECT_NEAR(back[k].boundary.coeffs[j], fwd.boundary.coeffs[j], 1e-9);
  }
  // Omega - limit vanishes at least linearly in beta: fitted exponent.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(branch.size());
  for (const auto& w : branch) {
    const double x = std::log(w.beta), y = std::log(std::abs(w.omega - kelvin_limit_omega(3)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_GE(slope, 1.0);
  std::printf("fitted exponent of Omega - limit: %.3f\n", slope);
}

TEST(VStateCases, CriticalRadiusValues) {
  EXPECT_NEAR(critical_radius_kelvin(2), 1.87, 0.01);
  EXPECT_NEAR(critical_radius_kelvin(3), 1.46, 0.01);
  EXPECT_NEAR(critical_radius_kelvin(4), 1.32, 0.01);
}

TEST(VStateCases, OnlyMultiplesOfMInBoundary) {
  const auto w = solve_kelvin(3, 0.05);
  EXPECT_EQ(w.boundary.m, 3);
  const auto c = w.contour(384);
  const auto fb = fit_fourier(c, 1, 40);
  for (int k = 1; k <= 40; ++k)
    if (k % 3 != 0) {
      EXPECT_LT(std::abs(fb.coeffs[k - 1]), 1e-13) << k;
    }
}

TEST(VStateCases, RelativeStreamNegativeOutsideUpToCriticalRadius) {
  for (int m : {2, 3}) {
    const auto w = solve_kelvin(m, 0.02);
    const PatchField f(w.contour(512));
    const double rbar = 0.9 * critical_radius_kelvin(m);
    double r2 = 0.0;
    for (int j = 0; j < 512; ++j) r2 = std::max(r2, w.radius(two_pi * j / 512));
    for (int i = 0; i < 24; ++i) {
      const double t = two_pi * i / 24;
      const double rb = w.radius(t);
      for (int k = 1; k <= 10; ++k) {
        const double r = rb + (rbar * r2 - rb) * k / 10.0;
        EXPECT_LT(relative_stream(w, f, std::polar(r, t)), 0.0) << m << ' ' << t << ' ' << r;
      }
    }
  }
}
