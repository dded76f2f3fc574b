#include <gtest/gtest.h>

#include <random>

#include "kelvin/geometry.hpp"

using namespace kelvin;

namespace {

NodeContour ellipse(double a, double b, int n, double phase = 0.0) {
  std::vector<Point> z(n);
  for (int j = 0; j < n; ++j) {
    const double t = two_pi * j / n + phase;
    z[j] = {a * std::cos(t), b * std::sin(t)};
  }
  return NodeContour(std::move(z));
}

NodeContour square(double s) { return NodeContour({{0, 0}, {s, 0}, {s, s}, {0, s}}); }

}  // namespace

TEST(Contour, RejectsTooFewNodes) {
  EXPECT_THROW(NodeContour({{0, 0}, {1, 0}}), InvalidContour);
}

TEST(Contour, RejectsCoincidentNodes) {
  EXPECT_THROW(NodeContour({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), InvalidContour);
}

TEST(Contour, RejectsClockwiseButAnyOrientationFlips) {
  std::vector<Point> cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  EXPECT_THROW(NodeContour{cw}, InvalidContour);
  const auto c = NodeContour::any_orientation(cw);
  EXPECT_NEAR(polygon_area(c), 1.0, 1e-15);
}

TEST(Contour, RejectsNonFinite) {
  EXPECT_THROW(NodeContour({{0, 0}, {1, 0}, {NAN, 1}}), InvalidContour);
}

TEST(Contour, CheckedRejectsBowtie) {
  // A figure-eight with positive net area so only the simplicity check fires.
  std::vector<Point> z = {{0, 0}, {2, 0}, {2, 1}, {1, -0.2}, {0, 1}};
  EXPECT_THROW(NodeContour::checked(z), InvalidContour);
}

TEST(Geometry, PolygonAreaOfSquare) { EXPECT_DOUBLE_EQ(polygon_area(square(2.0)), 4.0); }

TEST(Geometry, SpectralAreaAndPolygonalPerimeterOfEllipse) {
  const auto c = ellipse(2.0, 1.0, 256);
  EXPECT_NEAR(area(c), 2.0 * pi, 1e-12);
  // Ramanujan's second approximation is accurate to ~1e-10 at this aspect.
  const double h = 1.0 / 9.0;
  const double ram = pi * 3.0 * (1.0 + 3 * h / (10 + std::sqrt(4 - 3 * h)));
  // The perimeter is the polygon length: second order in the node spacing.
  const double e1 = ram - perimeter(c), e2 = ram - perimeter(ellipse(2.0, 1.0, 512));
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e1 / e2, 4.0, 0.01);
  EXPECT_LT(e1 / ram, 1e-4);
}

TEST(Geometry, IsoperimetricAndRotationInvariance) {
  const auto c = polar_contour([](double t) { return 1.0 + 0.3 * std::cos(3 * t) + 0.1 * std::sin(2 * t); }, 200);
  EXPECT_GE(perimeter(c) * perimeter(c), 4 * pi * area(c));
  const auto r = rotate(c, 0.91);
  EXPECT_NEAR(area(r), area(c), 1e-12);
  EXPECT_NEAR(perimeter(r), perimeter(c), 1e-12);
  EXPECT_NEAR(angular_impulse(r), angular_impulse(c), 1e-12);
}

TEST(Geometry, ImpulseOfDisc) {
  const auto c = circle(1.5, 128);
  EXPECT_NEAR(angular_impulse(c), pi * std::pow(1.5, 4) / 2.0, 1e-12);
}

TEST(Geometry, MomentVanishesForDiscAndIsEquivariant) {
  EXPECT_LT(std::abs(complex_moment(circle(1.0, 128), 3)), 1e-13);
  const auto c = polar_contour([](double t) { return 1.0 + 0.1 * std::cos(3 * t); }, 256);
  const Point I = complex_moment(c, 3);
  EXPECT_GT(std::abs(I), 0.1);
  const double alpha = 0.37;
  const Point Ir = complex_moment(rotate(c, alpha), 3);
  EXPECT_NEAR(std::abs(Ir - I * unit(3 * alpha)), 0.0, 1e-12);
}

TEST(Geometry, CentroidOfTranslatedDisc) {
  const auto c = translate(circle(1.0, 64), {0.3, -0.2});
  EXPECT_NEAR(std::abs(centroid(c) - Point(0.3, -0.2)), 0.0, 1e-12);
}

TEST(Geometry, TorusProjectRange) {
  for (int m : {2, 3, 5})
    for (double a : {-10.0, -1.0, 0.0, 0.5, 3.0, 17.0}) {
      const double p = torus_project(a, m);
      EXPECT_GE(p, -pi / m - 1e-15);
      EXPECT_LT(p, pi / m + 1e-15);
      const double k = (a - p) / (two_pi / m);
      EXPECT_NEAR(k, std::round(k), 1e-9);
    }
}

TEST(Raster, SelfDistanceIsZero) {
  const auto c = ellipse(1.2, 0.8, 200);
  EXPECT_EQ(symmetric_difference_area(c, c), 0.0);
}

TEST(Raster, DisjointSquaresGiveTotalArea) {
  const auto a = square(1.0);
  const auto b = translate(square(1.0), {3.0, 0.0});
  EXPECT_NEAR(symmetric_difference_area(a, b), 2.0, 2e-3);
}

TEST(Raster, NestedDiscsGiveAnnulusArea) {
  const auto a = circle(1.0, 512), b = circle(0.9, 512);
  const double exact = polygon_area(a) - polygon_area(b);
  EXPECT_NEAR(symmetric_difference_area(a, b), exact, 1e-4 * exact + 1e-5);
}

TEST(Raster, SymmetricAndTriangleInequality) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 5; ++k) {
    const auto a = translate(ellipse(1.0, 0.7, 128, u(rng)), {u(rng), u(rng)});
    const auto b = translate(ellipse(0.9, 1.1, 128, u(rng)), {u(rng), u(rng)});
    const auto c = translate(circle(1.0, 128), {u(rng), u(rng)});
    const double ab = symmetric_difference_area(a, b), ba = symmetric_difference_area(b, a);
    EXPECT_NEAR(ab, ba, 1e-3 * ab);
    EXPECT_LE(ab, symmetric_difference_area(a, c) + symmetric_difference_area(c, b) + 1e-3);
  }
}

TEST(Raster, RejectsBadRows) {
  RasterOptions o;
  o.rows = 0;
  EXPECT_THROW(symmetric_difference_area(square(1), square(1), o), InvalidArgument);
}

TEST(Symmetry, CheckMFold) {
  const auto c = polar_contour([](double t) { return 1.0 + 0.1 * std::cos(3 * t); }, 300);
  EXPECT_TRUE(check_m_fold(c, 3));
  EXPECT_FALSE(check_m_fold(c, 2));
  EXPECT_THROW(check_m_fold(c, 1), InvalidArgument);
}

TEST(Symmetry, MinRotationRecoversAngle) {
  const auto ref = polar_contour([](double t) { return 1.0 + 0.1 * std::cos(3 * t); }, 300);
  for (double alpha : {0.0, 0.2, -0.7, 1.9}) {
    const auto fit = min_rotation_distance(rotate(ref, alpha), ref, 3);
    EXPECT_LT(fit.distance, 1e-4);
    EXPECT_NEAR(torus_project(fit.angle - alpha, 3), 0.0, 1e-4);
  }
}

TEST(GeometryCases, AreaValues) {
  EXPECT_NEAR(area(circle(1.0, 1024)), pi, 1e-5);
  EXPECT_DOUBLE_EQ(polygon_area(NodeContour({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})), 4.0);
  const auto fig = polar_contour([](double t) { return 2.0 + std::sin(3 * t); }, 2048);
  EXPECT_NEAR(area(fig), 4.5 * pi, 1e-10);
}

TEST(GeometryCases, PerimeterValues) {
  EXPECT_NEAR(perimeter(circle(1.0, 1024)), two_pi, 1e-4);
  const double sliver = perimeter(NodeContour({{0, 0}, {1, 0}, {0.5, 1e-9}}));
  EXPECT_TRUE(std::isfinite(sliver));
  EXPECT_GT(sliver, 0.0);
  // Arclength integral of r = 2 + sin 3t by composite Simpson on a fine grid.
  const int n = 20000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = two_pi * k / n;
    const double r = 2.0 + std::sin(3 * t), dr = 3.0 * std::cos(3 * t);
    const double f = std::sqrt(r * r + dr * dr);
    s += f * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  s *= two_pi / n / 3.0;
  // Polygon length: relative error O(N^-2).
  EXPECT_NEAR(perimeter(polar_contour([](double t) { return 2.0 + std::sin(3 * t); }, 4096)) / s, 1.0, 1e-6);
}

TEST(GeometryCases, ImpulseValues) {
  EXPECT_NEAR(angular_impulse(circle(1.0, 256)), pi / 2, 1e-5);
  EXPECT_NEAR(angular_impulse(circle(2.0, 256)), 8 * pi, 1e-4);
  EXPECT_NEAR(angular_impulse(circle(1.0, 256)) - angular_impulse(circle(0.5, 256)), pi / 2 - pi / 32, 1e-10);
}

TEST(GeometryCases, AreaConvergesSpectrally) {
  // r = exp(0.3 cos 2t): area pi I0(0.6).
  auto g = [](double t) { return std::exp(0.3 * std::cos(2 * t)); };
  const double exact = pi * std::cyl_bessel_i(0.0, 0.6);
  const double e16 = std::abs(area(polar_contour(g, 16)) - exact);
  const double e32 = std::abs(area(polar_contour(g, 32)) - exact);
  const double e64 = std::abs(area(polar_contour(g, 64)) - exact);
  EXPECT_LT(e32, 1e-3 * e16);
  EXPECT_LT(e64, 1e-12);
  // The shoelace value converges algebraically towards the same limit.
  const double s64 = std::abs(polygon_area(polar_contour(g, 64)) - exact);
  const double s128 = std::abs(polygon_area(polar_contour(g, 128)) - exact);
  EXPECT_NEAR(s64 / s128, 4.0, 0.2);
}

TEST(GeometryCases, MomentOfKelvinShapeIsPiBeta) {
  const double beta = 0.05;
  const auto c = polar_contour([&](double t) { return 1.0 + beta * std::cos(3 * t); }, 256);
  EXPECT_NEAR(std::abs(complex_moment(c, 3)), pi * beta, 0.1 * pi * beta);
  EXPECT_LT(std::abs(complex_moment(circle(1.0, 128), 5)), 1e-10);
}

TEST(GeometryCases, RasterValues) {
  const auto a = circle(1.0, 1024), b = circle(1.1, 1024);
  EXPECT_NEAR(symmetric_difference_area(a, b), 0.21 * pi, 1e-3);
  EXPECT_NEAR(symmetric_difference_area(a, translate(a, {2.5, 0.0})), two_pi, 1e-3);
}

TEST(GeometryCases, MinRotationValues) {
  const auto ref = polar_contour([](double t) { return 1.0 + 0.1 * std::cos(3 * t); }, 300);
  const auto same = min_rotation_distance(ref, ref, 3);
  EXPECT_LT(same.distance, 1e-6);
  EXPECT_NEAR(same.angle, 0.0, 1e-6);
  // A bump of area delta: the distance lies in [delta/2, 2 delta] and below the fixed distance.
  auto bump = [](double t) {
    const double d = std::remainder(t - 1.0, two_pi);
    return 1.0 + 0.1 * std::cos(3 * t) + 0.02 * std::exp(-d * d / 0.01);
  };
  const auto a = polar_contour(bump, 600);
  const auto ref600 = polar_contour([](double t) { return 1.0 + 0.1 * std::cos(3 * t); }, 600);
  const double delta = area(a) - area(ref600);
  const auto fit = min_rotation_distance(a, ref600, 3);
  EXPECT_GE(fit.distance, 0.5 * delta);
  EXPECT_LE(fit.distance, 2.0 * delta);
  EXPECT_LE(fit.distance, symmetric_difference_area(a, ref600) * (1 + 1e-9));
}

TEST(GeometryCases, RotateValues) {
  const auto c = polar_contour([](double t) { return 2.0 + std::sin(3 * t); }, 128);
  const auto r0 = rotate(c, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(r0[j], c[j]);
  const auto r2 = rotate(c, two_pi);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_NEAR(std::abs(r2[j] - c[j]), 0.0, 1e-12);
  const double alpha = 0.4;
  EXPECT_NEAR(std::abs(complex_moment(rotate(c, alpha), 3) - unit(3 * alpha) * complex_moment(c, 3)), 0.0, 1e-10);
}

TEST(GeometryCases, TorusProjectValues) {
  EXPECT_EQ(torus_project(0.0, 3), 0.0);
  EXPECT_NEAR(torus_project(two_pi / 3, 3), 0.0, 1e-15);
  EXPECT_NEAR(torus_project(pi / 3 + 0.01, 3), -pi / 3 + 0.01, 1e-14);
}

TEST(GeometryCases, MFoldValues) {
  EXPECT_TRUE(check_m_fold(circle(1.0, 500), 5));
  const auto fig = polar_contour([](double t) { return 2.0 + std::sin(3 * t); }, 600);
  EXPECT_TRUE(check_m_fold(fig, 3));
  EXPECT_FALSE(check_m_fold(fig, 2));
}

TEST(GeometryCases, FourierBoundaryValues) {
  const auto c = fourier_to_contour(FourierBoundary{1.5, 3, {0.0, 0.0}}, 64);
  for (const auto& p : c) EXPECT_NEAR(std::abs(p), 1.5, 1e-15);
  const FourierBoundary fb{2.0, 3, {0.1, -0.02, 0.005}};
  const auto back = fit_fourier(fourier_to_contour(fb, 256), 3, 3);
  EXPECT_NEAR(back.r0, fb.r0, 1e-10);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back.coeffs[k], fb.coeffs[k], 1e-10);
}
