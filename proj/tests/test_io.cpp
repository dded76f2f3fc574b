#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "kelvin/io.hpp"

using namespace kelvin;
namespace fs = std::filesystem;

TEST(Io, ContourRoundTripAndOrientation) {
  const auto c = circle(1.0, 16);
  const auto j = io::contour_to_json(c);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 16u);
  EXPECT_EQ(j[0].size(), 2u);
  const auto back = io::contour_from_json(j);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(back[k], c[k]);
  // Clockwise input is accepted and reoriented.
  const auto cw = io::json::parse("[[0,0],[0,1],[1,1],[1,0]]");
  EXPECT_GT(polygon_area(io::contour_from_json(cw)), 0.0);
  EXPECT_ANY_THROW(io::contour_from_json(io::json::parse("[[0,0],[1,0]]")));
}

TEST(Io, WaveRoundTrip) {
  const auto w = solve_kelvin(3, 0.05);
  const auto j = io::wave_to_json(w);
  for (const char* key : {"m", "beta", "omega", "r0", "coeffs", "residual"}) EXPECT_TRUE(j.contains(key)) << key;
  const auto back = io::wave_from_json(j);
  EXPECT_EQ(back.omega, w.omega);
  EXPECT_EQ(back.boundary.coeffs, w.boundary.coeffs);
  EXPECT_EQ(back.radius(0.3), w.radius(0.3));
}

TEST(Io, FourierBoundaryRoundTrip) {
  FourierBoundary fb{1.1, 4, {0.02, 0.001}};
  const auto back = io::boundary_from_json(io::boundary_to_json(fb));
  EXPECT_EQ(back.r0, fb.r0);
  EXPECT_EQ(back.m, fb.m);
  EXPECT_EQ(back.coeffs, fb.coeffs);
}

TEST(Io, PointsAndFieldCsv) {
  std::istringstream in("x,y\n0,0\n2.5,-1\n\n");
  const auto pts = io::read_points_csv(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1], Point(2.5, -1));
  const auto csv = io::field_csv(PatchField(circle(1.0, 64)).sample(pts));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,psi,ux,uy");
  std::istringstream bad("x,y\n1\n");
  EXPECT_ANY_THROW(io::read_points_csv(bad));
}

TEST(Io, DiagnosticsCsvHeader) {
  EvolveOptions eo;
  eo.log_interval = 0.05;
  const auto h = evolve(EvolutionState{0.0, circle(1.0, 32), 0}, 0.1, 0.05, eo);
  const auto csv = io::diagnostics_csv(h.log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,area,impulse,energy,perimeter,Re I,Im I");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Io, ConfigRoundTripAndDefaults) {
  const auto j = io::json::parse(R"({"kind":"rotation-tracking","m":4,"beta":0.03,
      "perturbation":{"modes":[8],"weights":[1],"l1_size":0.002},
      "shape":{"r0":2,"terms":[[3,0,1]]},"T":3})");
  const auto c = io::config_from_json(j);
  EXPECT_EQ(c.kind, ExperimentKind::rotation_tracking);
  EXPECT_EQ(c.m, 4);
  EXPECT_EQ(c.perturbation.modes, std::vector<int>{8});
  ASSERT_TRUE(c.shape.has_value());
  EXPECT_EQ(c.shape->radius(pi / 6), 3.0);
  EXPECT_EQ(c.N, ExperimentConfig{}.N);
  const auto back = io::config_from_json(io::config_to_json(c));
  EXPECT_EQ(back.T, c.T);
  EXPECT_EQ(back.perturbation.l1_size, c.perturbation.l1_size);
  EXPECT_EQ(io::configs_from_json(io::json::array({j, j})).size(), 2u);
  EXPECT_THROW(io::config_from_json(io::json::parse(R"({"kind":"nope"})")), InvalidArgument);
}

TEST(Io, WriteRecordProducesArtifacts) {
  const fs::path base = fs::temp_directory_path() / "kelvin_io_test";
  fs::remove_all(base);
  auto c = figure_one_config();
  c.T = 0.2;
  c.N = 64;
  c.dt = 0.05;
  c.snapshot_times = {0.0, 0.2};
  c.track_min_rotation = false;
  const auto r = run_filamentation(c);
  ASSERT_TRUE(r.error.empty()) << r.error;
  const auto dir = io::timestamped_dir(base, "unit");
  io::write_record(dir, r);
  EXPECT_TRUE(fs::exists(dir / "record.json"));
  EXPECT_TRUE(fs::exists(dir / "series.csv"));
  EXPECT_TRUE(fs::exists(dir / "snapshot_t0.00.json"));
  EXPECT_TRUE(fs::exists(dir / "frame_t0.20.svg"));
  const auto rec = io::read_json(dir / "record.json");
  EXPECT_EQ(rec.at("config").at("kind"), "filamentation");
  EXPECT_NE(io::read_text(dir / "frame_t0.20.svg").find("<svg"), std::string::npos);
  // A second directory in the same second gets a suffix.
  EXPECT_NE(io::timestamped_dir(base, "unit"), dir);
  fs::remove_all(base);
}

TEST(Io, ReadMissingFileThrows) { EXPECT_ANY_THROW(io::read_text("/nonexistent/kelvin.json")); }
