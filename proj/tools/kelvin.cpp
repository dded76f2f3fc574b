// Command line front end: waves, spectra, annuli, field samples, evolution
// and scripted experiments.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kelvin/annulus.hpp"
#include "kelvin/evolution.hpp"
#include "kelvin/experiments.hpp"
#include "kelvin/field.hpp"
#include "kelvin/io.hpp"
#include "kelvin/spectrum.hpp"
#include "kelvin/vstate.hpp"

namespace fs = std::filesystem;
using kelvin::io::json;

namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    kelvin::io::write_json(out, j);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kelvin waves of the 2D Euler equations: contour dynamics lab"};
  app.require_subcommand(1);

  // vstate
  int vs_m = 3, vs_modes = 16, vs_nodes = 512;
  double vs_beta = 0.05;
  std::string vs_svg, vs_out, vs_contour;
  auto* vstate = app.add_subcommand("vstate", "solve for a rotating Kelvin wave");
  vstate->add_option("--m", vs_m, "symmetry order")->check(CLI::Range(2, 64));
  vstate->add_option("--beta", vs_beta, "first Fourier coefficient");
  vstate->add_option("--modes", vs_modes, "Fourier modes in the boundary");
  vstate->add_option("--nodes", vs_nodes, "nodes of the exported contour");
  vstate->add_option("--svg", vs_svg, "write an SVG of the boundary");
  vstate->add_option("--contour", vs_contour, "write the boundary as a JSON contour");
  vstate->add_option("--out", vs_out, "write the wave JSON here instead of stdout");

  // spectrum
  int sp_m = 3, sp_n = 256;
  double sp_beta = 0.02;
  bool sp_all_modes = false;
  std::string sp_csv, sp_out;
  auto* spectrum = app.add_subcommand("spectrum", "constrained spectrum of the linearised energy form");
  spectrum->add_option("--m", sp_m)->check(CLI::Range(2, 64));
  spectrum->add_option("--beta", sp_beta);
  spectrum->add_option("--n", sp_n, "grid size");
  spectrum->add_flag("--all-modes", sp_all_modes, "drop the m-fold restriction");
  spectrum->add_option("--csv", sp_csv, "write the full spectrum as CSV");
  spectrum->add_option("--out", sp_out);

  // annulus
  double an_r1 = 0.5, an_r2 = 1.0;
  int an_samples = 400, an_factor = 64, an_modes = 32;
  std::string an_csv, an_out;
  auto* annulus = app.add_subcommand("annulus", "annulus stream function and per-mode coercivity");
  annulus->add_option("--r1", an_r1);
  annulus->add_option("--r2", an_r2);
  annulus->add_option("--samples", an_samples, "psi samples on [0, 1.5 r*]");
  annulus->add_option("--nmax-factor", an_factor, "modes scanned up to factor * m");
  annulus->add_option("--modes", an_modes, "per-mode eigenvalues reported for n = 1..modes");
  annulus->add_option("--csv", an_csv, "write r, G, psi samples as CSV");
  annulus->add_option("--out", an_out);

  // field
  std::string fd_contour, fd_points, fd_out;
  int fd_m = 0;
  double fd_beta = 0.05;
  int fd_nodes = 512;
  auto* field = app.add_subcommand("field", "stream function and velocity at CSV points");
  field->add_option("--contour", fd_contour, "patch boundary as a JSON contour");
  field->add_option("--wave-m", fd_m, "use the Kelvin wave of this order instead");
  field->add_option("--wave-beta", fd_beta);
  field->add_option("--nodes", fd_nodes);
  field->add_option("--points", fd_points, "CSV with columns x,y (stdin when omitted)");
  field->add_option("--out", fd_out, "CSV output (stdout when omitted)");

  // evolve
  std::string ev_contour, ev_dir = "runs";
  double ev_T = 1.0, ev_dt = 0.01, ev_log = 0.1;
  int ev_m = 3;
  bool ev_remesh = false;
  std::vector<double> ev_snaps;
  auto* evolve = app.add_subcommand("evolve", "contour dynamics of a JSON contour");
  evolve->add_option("--contour", ev_contour)->required();
  evolve->add_option("--T", ev_T);
  evolve->add_option("--dt", ev_dt);
  evolve->add_option("--log", ev_log, "diagnostics interval");
  evolve->add_option("--moment", ev_m, "order of the logged complex moment");
  evolve->add_option("--snapshots", ev_snaps, "snapshot times")->delimiter(',');
  evolve->add_flag("--remesh", ev_remesh);
  evolve->add_option("--out-dir", ev_dir);

  // experiment / sweep
  std::string ex_config, ex_dir = "runs";
  auto* experiment = app.add_subcommand("experiment", "run one experiment config");
  experiment->add_option("--config", ex_config)->required()->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", ex_dir);

  std::string sw_config, sw_dir = "runs";
  unsigned sw_threads = 0;
  auto* sweep = app.add_subcommand("sweep", "run a JSON array of configs");
  sweep->add_option("--config", sw_config)->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", sw_dir);
  sweep->add_option("--threads", sw_threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vstate) {
      kelvin::KelvinSolverOptions opt;
      opt.modes = vs_modes;
      const auto w = kelvin::solve_kelvin(vs_m, vs_beta, opt);
      if (!vs_svg.empty()) kelvin::io::write_text(vs_svg, kelvin::io::svg({w.contour(vs_nodes)}));
      if (!vs_contour.empty()) kelvin::io::write_json(vs_contour, kelvin::io::contour_to_json(w.contour(vs_nodes)));
      emit(kelvin::io::wave_to_json(w), vs_out);
    } else if (*spectrum) {
      const auto w = kelvin::solve_kelvin(sp_m, sp_beta);
      const auto L = kelvin::assemble_linearized(w, sp_n);
      const auto cs = kelvin::default_constraints(L, !sp_all_modes);
      const auto sp = kelvin::constrained_spectrum(L, cs);
      std::vector<double> eigs(sp.eigenvalues.data(), sp.eigenvalues.data() + sp.eigenvalues.size());
      std::vector<double> top(eigs.begin(), eigs.begin() + std::min<std::size_t>(10, eigs.size()));
      json j = {{"m", sp_m},
                {"beta", sp_beta},
                {"n", sp_n},
                {"m_fold", !sp_all_modes},
                {"omega", w.omega},
                {"max_eig", eigs.empty() ? 0.0 : eigs.front()},
                {"eigs", top},
                {"I0_range", {L.I0_values.minCoeff(), L.I0_values.maxCoeff()}}};
      if (!sp_csv.empty()) {
        std::ostringstream os;
        os << "index,eigenvalue\n";
        for (std::size_t k = 0; k < eigs.size(); ++k) os << k << ',' << kelvin::io::csv_number(eigs[k]) << '\n';
        kelvin::io::write_text(sp_csv, os.str());
      }
      emit(j, sp_out);
    } else if (*annulus) {
      const auto a = kelvin::build_annulus(an_r1, an_r2);
      const auto thr = kelvin::coercivity_threshold(a, an_factor);
      json per_mode = json::array();
      for (int n = 1; n <= an_modes; ++n) per_mode.push_back({{"n", n}, {"max_eig", kelvin::mode_max_eigenvalue(a, n)}});
      json j = {{"r1", a.r1},
                {"r2", a.r2},
                {"C1", a.C1},
                {"gauge", a.gauge},
                {"rstar", a.rstar},
                {"slope_inner", a.slope_inner},
                {"slope_outer", a.slope_outer},
                {"threshold_m", thr.threshold},
                {"n_max", thr.n_max},
                {"tail_bound", thr.tail_bound},
                {"per_mode", per_mode}};
      if (!an_csv.empty()) {
        std::ostringstream os;
        os << "r,G,psi\n";
        const double rmax = 1.5 * a.rstar;
        for (int k = 0; k <= an_samples; ++k) {
          const double r = rmax * k / an_samples;
          os << kelvin::io::csv_number(r) << ',' << kelvin::io::csv_number(kelvin::annulus_G(a.r1, a.r2, r)) << ','
             << kelvin::io::csv_number(kelvin::annulus_stream(a, r)) << '\n';
        }
        kelvin::io::write_text(an_csv, os.str());
      }
      emit(j, an_out);
    } else if (*field) {
      kelvin::NodeContour c;
      if (!fd_contour.empty()) {
        c = kelvin::io::contour_from_json(kelvin::io::read_json(fd_contour));
      } else if (fd_m >= 2) {
        c = kelvin::solve_kelvin(fd_m, fd_beta).contour(fd_nodes);
      } else {
        throw kelvin::InvalidArgument("field needs --contour or --wave-m");
      }
      std::vector<kelvin::Point> pts;
      if (fd_points.empty()) {
        pts = kelvin::io::read_points_csv(std::cin);
      } else {
        std::ifstream in(fd_points);
        if (!in) throw kelvin::Error("cannot read " + fd_points);
        pts = kelvin::io::read_points_csv(in);
      }
      const kelvin::PatchField pf(c);
      const auto csv = kelvin::io::field_csv(pf.sample(pts));
      if (fd_out.empty()) {
        std::cout << csv;
      } else {
        kelvin::io::write_text(fd_out, csv);
      }
    } else if (*evolve) {
      const auto c = kelvin::io::contour_from_json(kelvin::io::read_json(ev_contour));
      kelvin::EvolveOptions eo;
      eo.log_interval = ev_log;
      eo.moment_order = ev_m;
      eo.snapshot_times = ev_snaps;
      if (ev_remesh) eo.remesh = kelvin::RemeshParams::from_initial(c);
      const auto h = kelvin::evolve(kelvin::EvolutionState{0.0, c, 0}, ev_T, ev_dt, eo);
      const auto dir = kelvin::io::timestamped_dir(ev_dir, "evolve");
      kelvin::io::write_text(dir / "diagnostics.csv", kelvin::io::diagnostics_csv(h.log));
      for (const auto& s : h.snapshots) {
        std::ostringstream tag;
        tag << "t" << std::fixed << std::setprecision(2) << s.time;
        kelvin::io::write_json(dir / ("snapshot_" + tag.str() + ".json"), kelvin::io::contour_to_json(s.contour));
        kelvin::io::write_text(dir / ("frame_" + tag.str() + ".svg"), kelvin::io::svg({s.contour}));
      }
      emit({{"dir", dir.string()},
            {"truncated", h.truncated},
            {"stop_reason", h.stop_reason},
            {"steps", h.final_state.step_count},
            {"nodes", h.final_state.contour.size()},
            {"remesh_events", h.remesh_events}},
           "");
    } else if (*experiment) {
      const auto cfgs = kelvin::io::configs_from_json(kelvin::io::read_json(ex_config));
      if (cfgs.size() != 1) throw kelvin::InvalidArgument("experiment expects a single config; use sweep");
      const auto r = kelvin::run_experiment(cfgs.front());
      const auto dir = kelvin::io::timestamped_dir(ex_dir, cfgs.front().name);
      kelvin::io::write_record(dir, r);
      json summary = kelvin::io::record_to_json(r, false);
      summary["dir"] = dir.string();
      emit(summary, "");
      return r.error.empty() ? 0 : 2;
    } else if (*sweep) {
      const auto cfgs = kelvin::io::configs_from_json(kelvin::io::read_json(sw_config));
      const auto records = kelvin::sweep_records(cfgs, sw_threads);
      const auto dir = kelvin::io::timestamped_dir(sw_dir, "sweep");
      json rows = json::array();
      for (std::size_t k = 0; k < records.size(); ++k) {
        kelvin::io::write_record(dir / (std::to_string(k) + "-" + records[k].config.name), records[k]);
        rows.push_back(kelvin::io::sweep_row_to_json(kelvin::summarize(records[k])));
      }
      kelvin::io::write_json(dir / "summary.json", rows);
      emit({{"dir", dir.string()}, {"rows", rows}}, "");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
