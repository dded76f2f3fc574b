#pragma once

// JSON, CSV and SVG serialisation of contours, waves, fields and run records.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kelvin/contour.hpp"
#include "kelvin/core.hpp"
#include "kelvin/diagnostics.hpp"
#include "kelvin/evolution.hpp"
#include "kelvin/experiments.hpp"
#include "kelvin/field.hpp"
#include "kelvin/vstate.hpp"

namespace kelvin::io {

using nlohmann::json;

inline json contour_to_json(const NodeContour& c) {
  json a = json::array();
  for (const auto& p : c) a.push_back({p.real(), p.imag()});
  return a;
}

/// Accepts either orientation; nodes are stored counter-clockwise.
inline NodeContour contour_from_json(const json& j) {
  if (!j.is_array()) throw InvalidContour("contour JSON must be an array of [x, y] pairs");
  std::vector<Point> z;
  z.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw InvalidContour("contour node must be an [x, y] pair");
    z.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return NodeContour::any_orientation(std::move(z));
}

inline json boundary_to_json(const FourierBoundary& fb) {
  return {{"r0", fb.r0}, {"m", fb.m}, {"coeffs", fb.coeffs}};
}

inline FourierBoundary boundary_from_json(const json& j) {
  FourierBoundary fb;
  fb.r0 = j.at("r0").get<double>();
  fb.m = j.at("m").get<int>();
  fb.coeffs = j.at("coeffs").get<std::vector<double>>();
  return fb;
}

inline json wave_to_json(const KelvinWave& w) {
  return {{"m", w.m},
          {"beta", w.beta},
          {"omega", w.omega},
          {"r0", w.boundary.r0},
          {"coeffs", w.boundary.coeffs},
          {"residual", w.residual},
          {"gauge", w.gauge},
          {"iterations", w.iterations},
          {"collocation", w.collocation}};
}

inline KelvinWave wave_from_json(const json& j) {
  KelvinWave w;
  w.m = j.at("m").get<int>();
  w.beta = j.at("beta").get<double>();
  w.omega = j.at("omega").get<double>();
  w.boundary.r0 = j.at("r0").get<double>();
  w.boundary.m = w.m;
  w.boundary.coeffs = j.at("coeffs").get<std::vector<double>>();
  w.residual = j.at("residual").get<double>();
  w.gauge = j.value("gauge", 0.0);
  w.iterations = j.value("iterations", 0);
  w.collocation = j.value("collocation", 0);
  return w;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& path) { return json::parse(read_text(path)); }

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---- CSV ----

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::vector<Point> read_points_csv(std::istream& in) {
  std::vector<Point> pts;
  std::string line;
  bool header_checked = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_checked) {
      header_checked = true;
      if (line.find_first_of("xXyY") != std::string::npos) continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) throw InvalidArgument("malformed point row: " + line);
    pts.emplace_back(x, y);
  }
  return pts;
}

inline std::string field_csv(const std::vector<FieldSample>& samples) {
  std::ostringstream os;
  os << "x,y,psi,ux,uy\n";
  for (const auto& s : samples)
    os << csv_number(s.point.real()) << ',' << csv_number(s.point.imag()) << ',' << csv_number(s.stream) << ','
       << csv_number(s.velocity.real()) << ',' << csv_number(s.velocity.imag()) << '\n';
  return os.str();
}

inline std::string diagnostics_csv(const std::vector<LogEntry>& log) {
  std::ostringstream os;
  os << "t,area,impulse,energy,perimeter,Re I,Im I\n";
  for (const auto& e : log)
    os << csv_number(e.time) << ',' << csv_number(e.diag.area) << ',' << csv_number(e.diag.impulse) << ','
       << csv_number(e.diag.energy) << ',' << csv_number(e.diag.perimeter) << ','
       << csv_number(e.diag.moment.real()) << ',' << csv_number(e.diag.moment.imag()) << '\n';
  return os.str();
}

/// Columns of the run series; all share the time grid.
inline std::string series_csv(const RunRecord& r) {
  std::vector<std::pair<std::string, const std::vector<double>*>> cols = {
      {"t", &r.t},
      {"area", &r.area},
      {"impulse", &r.impulse},
      {"energy", &r.energy},
      {"perimeter", &r.perimeter},
      {"Re I", &r.moment_re},
      {"Im I", &r.moment_im},
      {"l1_fixed", &r.l1_fixed},
      {"l1_min", &r.l1_min},
      {"theta_moment", &r.theta_moment},
      {"theta_l1", &r.theta_l1},
      {"drift", &r.drift},
      {"nodes", &r.nodes}};
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, v] : cols) {
    if (v->empty()) continue;
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << '\n';
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    first = true;
    for (const auto& [name, v] : cols) {
      if (v->empty()) continue;
      os << (first ? "" : ",") << (k < v->size() ? csv_number((*v)[k]) : "");
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

/// Rebuild the series columns of a record from series_csv output.
inline void load_series_csv(RunRecord& r, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty series CSV");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
  }
  auto column = [&](const std::string& n) -> std::vector<double>* {
    if (n == "t") return &r.t;
    if (n == "area") return &r.area;
    if (n == "impulse") return &r.impulse;
    if (n == "energy") return &r.energy;
    if (n == "perimeter") return &r.perimeter;
    if (n == "Re I") return &r.moment_re;
    if (n == "Im I") return &r.moment_im;
    if (n == "l1_fixed") return &r.l1_fixed;
    if (n == "l1_min") return &r.l1_min;
    if (n == "theta_moment") return &r.theta_moment;
    if (n == "theta_l1") return &r.theta_l1;
    if (n == "drift") return &r.drift;
    if (n == "nodes") return &r.nodes;
    return nullptr;
  };
  for (const auto& n : names)
    if (auto* c = column(n)) c->clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k < names.size() && std::getline(ls, cell, ','); ++k)
      if (auto* c = column(names[k]); c && !cell.empty()) c->push_back(std::stod(cell));
  }
}

// ---- SVG ----

struct SvgOptions {
  int size = 600;
  double margin = 0.08;
  std::string stroke = "#1f4e79";
  std::string fill = "#9ec5e8";
};

inline std::string svg(const std::vector<NodeContour>& contours, const SvgOptions& opt = {},
                       const std::string& caption = "") {
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (const auto& c : contours)
    for (const auto& p : c) {
      lo_x = std::min(lo_x, p.real());
      hi_x = std::max(hi_x, p.real());
      lo_y = std::min(lo_y, p.imag());
      hi_y = std::max(hi_y, p.imag());
    }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y) * (1.0 + 2.0 * opt.margin);
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const double scale = opt.size / span;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size << "\" height=\"" << opt.size
     << "\" viewBox=\"0 0 " << opt.size << ' ' << opt.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : contours) {
    os << "<polygon fill=\"" << opt.fill << "\" stroke=\"" << opt.stroke << "\" stroke-width=\"1\" points=\"";
    for (const auto& p : c) {
      const double x = 0.5 * opt.size + (p.real() - cx) * scale;
      const double y = 0.5 * opt.size - (p.imag() - cy) * scale;
      os << std::setprecision(6) << x << ',' << y << ' ';
    }
    os << "\"/>\n";
  }
  if (!caption.empty())
    os << "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" << caption << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

// ---- experiment configs and records ----

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.kind = parse_kind(j.value("kind", std::string("stability")));
  c.name = j.value("name", c.name);
  c.m = j.value("m", c.m);
  c.beta = j.value("beta", c.beta);
  if (j.contains("perturbation")) {
    const auto& p = j.at("perturbation");
    c.perturbation.modes = p.value("modes", std::vector<int>{});
    c.perturbation.weights = p.value("weights", std::vector<double>{});
    c.perturbation.l1_size = p.value("l1_size", 0.0);
    c.perturbation.random_phases = p.value("random_phases", true);
  }
  if (j.contains("shape")) {
    ShapeSpec s;
    s.r0 = j.at("shape").at("r0").get<double>();
    for (const auto& t : j.at("shape").value("terms", json::array()))
      s.terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>(), t.at(2).get<double>());
    c.shape = s;
  }
  c.T = j.value("T", c.T);
  c.dt = j.value("dt", c.dt);
  c.N = j.value("N", c.N);
  c.solver_modes = j.value("solver_modes", c.solver_modes);
  c.log_interval = j.value("log_interval", c.log_interval);
  c.snapshot_times = j.value("snapshot_times", c.snapshot_times);
  c.remesh = j.value("remesh", c.remesh);
  c.h_max_factor = j.value("h_max_factor", c.h_max_factor);
  c.h_min_ratio = j.value("h_min_ratio", c.h_min_ratio);
  c.node_cap = j.value("node_cap", c.node_cap);
  c.raster_rows = j.value("raster_rows", c.raster_rows);
  c.raster_refine = j.value("raster_refine", c.raster_refine);
  c.seed = j.value("seed", c.seed);
  c.r_prime = j.value("r_prime", c.r_prime);
  c.l1_threshold = j.value("l1_threshold", c.l1_threshold);
  c.window_factor = j.value("window_factor", c.window_factor);
  c.track_min_rotation = j.value("track_min_rotation", c.track_min_rotation);
  c.perimeter_ratio = j.value("perimeter_ratio", c.perimeter_ratio);
  c.growth_onset = j.value("growth_onset", c.growth_onset);
  c.coherence_limit = j.value("coherence_limit", c.coherence_limit);
  c.trace_radii = j.value("trace_radii", c.trace_radii);
  c.frame_interval = j.value("frame_interval", c.frame_interval);
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j = {{"kind", to_string(c.kind)},
            {"name", c.name},
            {"m", c.m},
            {"beta", c.beta},
            {"perturbation",
             {{"modes", c.perturbation.modes},
              {"weights", c.perturbation.weights},
              {"l1_size", c.perturbation.l1_size},
              {"random_phases", c.perturbation.random_phases}}},
            {"T", c.T},
            {"dt", c.dt},
            {"N", c.N},
            {"solver_modes", c.solver_modes},
            {"log_interval", c.effective_log_interval()},
            {"snapshot_times", c.snapshot_times},
            {"remesh", c.remesh},
            {"h_max_factor", c.h_max_factor},
            {"h_min_ratio", c.h_min_ratio},
            {"node_cap", c.node_cap},
            {"raster_rows", c.raster_rows},
            {"raster_refine", c.raster_refine},
            {"seed", c.seed},
            {"r_prime", c.r_prime},
            {"l1_threshold", c.l1_threshold},
            {"window_factor", c.window_factor},
            {"track_min_rotation", c.track_min_rotation},
            {"perimeter_ratio", c.perimeter_ratio},
            {"growth_onset", c.growth_onset},
            {"coherence_limit", c.coherence_limit},
            {"trace_radii", c.trace_radii},
            {"frame_interval", c.frame_interval}};
  if (c.shape) {
    json terms = json::array();
    for (const auto& [k, a, b] : c.shape->terms) terms.push_back({k, a, b});
    j["shape"] = {{"r0", c.shape->r0}, {"terms", terms}};
  }
  return j;
}

inline std::vector<ExperimentConfig> configs_from_json(const json& j) {
  std::vector<ExperimentConfig> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(config_from_json(e));
  } else {
    out.push_back(config_from_json(j));
  }
  return out;
}

inline json record_to_json(const RunRecord& r, bool with_series = true) {
  json j = {{"config", config_to_json(r.config)},
            {"omega", r.omega},
            {"moment_ref", {r.moment_ref.real(), r.moment_ref.imag()}},
            {"initial_l1", r.initial_l1},
            {"initial_perimeter", r.initial_perimeter},
            {"metrics", r.metrics},
            {"verdicts", r.verdicts},
            {"truncated", r.truncated},
            {"stop_reason", r.stop_reason},
            {"error", r.error},
            {"runtime_seconds", r.runtime_seconds}};
  if (with_series) {
    j["series"] = {{"t", r.t},
                   {"l1_fixed", r.l1_fixed},
                   {"l1_min", r.l1_min},
                   {"theta_moment", r.theta_moment},
                   {"theta_l1", r.theta_l1},
                   {"drift", r.drift},
                   {"perimeter", r.perimeter},
                   {"area", r.area},
                   {"impulse", r.impulse},
                   {"energy", r.energy},
                   {"moment_re", r.moment_re},
                   {"moment_im", r.moment_im},
                   {"nodes", r.nodes}};
    if (!r.trace_t.empty()) j["trace"] = {{"t", r.trace_t}, {"winding", r.trace_winding}};
  }
  return j;
}

inline json sweep_row_to_json(const SweepRow& row) {
  return {{"name", row.name},
          {"kind", row.kind},
          {"metrics", row.metrics},
          {"verdicts", row.verdicts},
          {"error", row.error},
          {"runtime_seconds", row.runtime_seconds}};
}

/// <base>/<name>-YYYYmmdd-HHMMSS (suffixed when it already exists).
inline std::filesystem::path timestamped_dir(const std::filesystem::path& base, const std::string& name) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  std::filesystem::path dir = base / (name + "-" + stamp);
  for (int k = 1; std::filesystem::exists(dir); ++k) dir = base / (name + "-" + stamp + "-" + std::to_string(k));
  std::filesystem::create_directories(dir);
  return dir;
}

/// record.json, series.csv, snapshot JSON contours and SVG frames.
inline void write_record(const std::filesystem::path& dir, const RunRecord& r) {
  std::filesystem::create_directories(dir);
  write_json(dir / "record.json", record_to_json(r));
  write_text(dir / "series.csv", series_csv(r));
  for (const auto& s : r.snapshots) {
    std::ostringstream tag;
    tag << "t" << std::fixed << std::setprecision(2) << s.time;
    write_json(dir / ("snapshot_" + tag.str() + ".json"), contour_to_json(s.contour));
    write_text(dir / ("frame_" + tag.str() + ".svg"), svg({s.contour}, {}, "t = " + tag.str().substr(1)));
  }
  if (!r.trace_t.empty()) {
    std::ostringstream os;
    os << "t";
    for (std::size_t s = 0; s < r.trace_winding.size(); ++s) os << ",winding_" << s;
    os << '\n';
    for (std::size_t k = 0; k < r.trace_t.size(); ++k) {
      os << csv_number(r.trace_t[k]);
      for (const auto& w : r.trace_winding) os << ',' << (k < w.size() ? csv_number(w[k]) : "");
      os << '\n';
    }
    write_text(dir / "trace.csv", os.str());
  }
}

}  // namespace kelvin::io
