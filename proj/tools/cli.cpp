#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shellprobe/error.hpp"
#include "shellprobe/estimator.hpp"
#include "shellprobe/geometry.hpp"
#include "shellprobe/measurement.hpp"
#include "shellprobe/serialization.hpp"
#include "shellprobe/shell_solver.hpp"
#include "shellprobe/simulator.hpp"

namespace shellprobe::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Depths are SI meters; anything above this is almost certainly millimeters.
constexpr double kSuspiciousDepth = 1.0;

void warn_units(const IndentationSeries& series, std::ostream& err) {
  for (const auto& s : series.samples()) {
    if (s.depth > kSuspiciousDepth) {
      err << "warning: " << series.object_id() << ": depths above " << kSuspiciousDepth
          << " m found; inputs must be in meters (mixed units?)\n";
      return;
    }
  }
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text << '\n';
    return;
  }
  const fs::path p(*path);
  if (p.has_parent_path()) prepare_dir(p.parent_path().string());
  auto file = open_out(p);
  file << text << '\n';
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::vector<std::string> series;
  std::vector<double> pressures;
  std::vector<double> radii;
  std::vector<double> thicknesses;
  bool average_levels = false;
  std::optional<std::string> out;
};

double pick(const std::vector<double>& values, std::size_t i, const char* name) {
  if (values.size() == 1) return values.front();
  if (i < values.size()) return values[i];
  throw ValidationError(std::string("--") + name + " must be given once or once per series");
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.series.size() != a.pressures.size()) {
    throw ValidationError("--series and --pressure must be given the same number of times");
  }
  if (a.series.size() < 2) {
    throw InsufficientDataError("calibration needs at least two (series, pressure) pairs");
  }
  RegressionOptions opt;
  opt.average_levels = a.average_levels;
  std::vector<CalibrationRecord> records;
  std::vector<PhatFit> fits;
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    const auto series = parse_series(a.series[i], pick(a.radii, i, "radius"), pick(a.thicknesses, i, "thickness"));
    warn_units(series, err);
    print_warnings(series.warnings(), err);
    fits.push_back(regress_phat(series, opt));
    records.push_back({a.pressures[i], fits.back().Pg_hat});
  }
  const Calibration cal = calibrate_ks(records);
  out << "series                          Pg [Pa]    Pg_hat [Pa]   ratio    r2\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string name = fs::path(a.series[i]).filename().string();
    if (name.size() > 30) name = name.substr(0, 30);
    out << std::left << std::setw(32) << name << std::right << std::setw(8) << fixed(records[i].measured_Pg, 1)
        << std::setw(15) << fixed(records[i].estimated_Pg_hat, 1) << std::setw(8)
        << fixed(records[i].estimated_Pg_hat / records[i].measured_Pg, 4) << std::setw(8) << fixed(fits[i].r2, 4)
        << '\n';
  }
  out << "ks = " << fixed(cal.ks, 6) << "  (fit r2 = " << fixed(cal.fit_r2, 4) << ")\n";
  if (a.out) {
    write_text(a.out, to_json(cal), out);
  }
  return 0;
}

// ----------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string series;
  std::string calibration;
  std::optional<std::string> mesh;
  std::optional<int> seed_vertex;
  std::optional<double> patch_radius;
  std::optional<double> radius;
  std::optional<double> thickness;
  std::optional<int> wrinkles;
  double nu = kDefaultPoissonRatio;
  bool average_levels = false;
  std::optional<std::string> out;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.wrinkles) {
    throw ValidationError(
        "--wrinkles is required: poke the surface past the critical depth and count the radial "
        "wrinkles around the finger");
  }
  if (!a.thickness) throw ValidationError("--thickness is required");
  double R = 0.0;
  if (a.radius) {
    R = *a.radius;
  } else if (a.mesh) {
    if (!a.seed_vertex) throw ValidationError("--mesh needs --seed-vertex");
    const TriMesh mesh = load_mesh(*a.mesh);
    const double hint = a.patch_radius ? *a.patch_radius : 4.0 * mean_edge_length(mesh);
    const SphereFit fit = fit_curvature(select_patch(mesh, *a.seed_vertex, hint));
    if (fit.non_uniform) {
      err << "warning: curvature residual " << fit.rms_residual / fit.radius
          << " of the radius; the patch is not uniformly curved\n";
    }
    R = fit.radius;
  } else {
    throw ValidationError("give --radius or --mesh with --seed-vertex");
  }
  const auto series = parse_series(a.series, R, *a.thickness);
  warn_units(series, err);
  const Calibration cal = read_calibration(a.calibration);
  RegressionOptions opt;
  opt.average_levels = a.average_levels;
  const Estimate est = run_procedure3(series, cal, *a.wrinkles, a.nu, opt);
  print_warnings(est.warnings, err);
  write_text(a.out, to_json(est), out);
  return 0;
}

// -------------------------------------------------------------- solve-shell

struct SolveArgs {
  double radius = 0.0;
  double thickness = 0.0;
  double pressure = 0.0;
  std::optional<double> modulus;
  std::optional<double> tau;
  double nu = kDefaultPoissonRatio;
  std::vector<double> depths;
  bool critical = false;
  bool membrane = true;
  int grid = SolverOptions{}.grid_size;
  double rho_inf = SolverOptions{}.rho_inf;
  std::string out = ".";
};

int cmd_solve_shell(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  if (a.modulus.has_value() == a.tau.has_value()) {
    throw ValidationError("give exactly one of --modulus and --tau");
  }
  const ShellParams params = a.tau ? ShellParams::with_tau(*a.tau, a.radius, a.thickness, a.nu, a.pressure)
                                   : ShellParams{a.radius, a.thickness, *a.modulus, a.nu, a.pressure};
  params.validate();
  SolverOptions opt;
  opt.membrane_limit = a.membrane;
  opt.grid_size = a.grid;
  opt.rho_inf = a.rho_inf;
  opt.validate();
  if (a.depths.empty() && !a.critical) throw ValidationError("give --W0 and/or --critical");

  const fs::path dir = prepare_dir(a.out);
  const WrinkleCount wc = wrinkle_count(params);
  json diag;
  diag["tau"] = params.tau();
  diag["n_predicted"] = wc.count;
  diag["n_unrounded"] = wc.unrounded;
  diag["capillary_length_m"] = params.capillary_length();
  diag["membrane_limit"] = opt.membrane_limit;
  json warnings = json::array();

  if (!a.depths.empty()) {
    const auto sols = solve_sweep(params, a.depths, opt);
    json list = json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
      const auto& s = sols[i];
      const std::string name = sols.size() == 1 ? "profile.csv" : "profile_" + std::to_string(i) + ".csv";
      auto file = open_out(dir / name);
      write_solution_csv(file, s);
      json entry;
      entry["W0"] = s.W0;
      entry["force"] = s.force;
      entry["force_N"] = params.to_physical_force(s.force);
      entry["depth_m"] = params.to_physical_depth(s.W0);
      entry["profile"] = name;
      entry["stiffness_ratio"] = s.W0 < 0.0 ? s.force / (std::numbers::pi * -s.W0) : 0.0;
      entry["min_hoop_stress"] = s.min_hoop_stress();
      if (s.annulus) {
        entry["annulus"] = {{"rho_min", s.annulus->rho_min}, {"rho_max", s.annulus->rho_max}};
      } else {
        entry["annulus"] = nullptr;
      }
      entry["newton_iterations"] = s.newton_iterations;
      list.push_back(entry);
      out << "W0 = " << s.W0 << "  f = " << s.force << "  F = " << params.to_physical_force(s.force) << " N";
      if (s.annulus) out << "  annulus [" << s.annulus->rho_min << ", " << s.annulus->rho_max << "]";
      out << '\n';
    }
    diag["solutions"] = list;
  }
  if (a.critical) {
    CriticalDepthOptions copt;
    copt.solver = opt;
    const CriticalDepth c = critical_depth(params, copt);
    diag["critical_W0"] = c.W0;
    diag["critical_depth_m"] = params.to_physical_depth(c.W0);
    diag["bisection_iterations"] = c.bisection_iterations;
    for (const auto& w : c.warnings) warnings.push_back(w);
    out << "critical W0 = " << c.W0 << " (" << params.to_physical_depth(c.W0) << " m)\n";
  }
  out << "tau = " << params.tau() << "  predicted wrinkles = " << wc.count << " (" << wc.unrounded << ")\n";
  diag["warnings"] = warnings;
  for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << '\n';
  auto file = open_out(dir / "diagnostics.json");
  file << diag.dump(2) << '\n';
  return 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::string mesh;
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  Scenario sc = read_scenario(a.scenario);
  const TriMesh placed = place_mesh(load_mesh(a.mesh), sc);
  SimState state = init_sim(placed, sc.material);
  for (auto& v : state.velocities) v = sc.initial_velocity;
  const fs::path dir = prepare_dir(a.out);
  const std::optional<Plane> ground =
      sc.config.planes.empty() ? std::nullopt : std::optional<Plane>(sc.config.planes.front());
  if (state.rest->prestress_deviation > 0.05) {
    err << "warning: prestress fit leaves " << state.rest->prestress_deviation
        << " of the pressure load to the balance load\n";
  }

  json summary;
  summary["prestress_deviation"] = state.rest->prestress_deviation;
  summary["vertices"] = placed.vertices.size();
  summary["faces"] = placed.faces.size();
  long frame = 0;
  try {
    if (sc.indentation) {
      const auto& plan = *sc.indentation;
      const auto series = indent_virtual(state, sc.config, plan.target_depth, plan.region_radius, plan.options,
                                         [&](const IndentProgress& p) {
                                           out << "depth " << p.depth << " m  force " << p.force
                                               << " N  relaxation steps " << p.relaxation_steps << '\n';
                                         });
      write_series(dir / "series.csv", series);
      const PhatFit fit = regress_phat(series);
      summary["series"] = "series.csv";
      summary["slope"] = fit.slope;
      summary["r2"] = fit.r2;
      summary["ks_simulated"] = fit.Pg_hat / sc.material.Pg0;
      out << "wrote " << (dir / "series.csv").string() << "  slope " << fit.slope << " N/m  r2 " << fit.r2 << '\n';
    } else {
      auto csv = open_out(dir / "tracked.csv");
      write_tracked_header(csv);
      write_tracked_row(csv, track(state, ground));
      const double lift = ground ? (state.centroid() - ground->point).dot(ground->normal.normalized()) : 0.0;
      double bottom_offset = 0.0;
      if (ground) {
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto& v : state.mesh.vertices) {
          lowest = std::min(lowest, (v - ground->point).dot(ground->normal.normalized()));
        }
        bottom_offset = lift - lowest;
      }
      bool touched = false;
      std::optional<double> apex;
      const auto steps = static_cast<long>(std::llround(sc.config.duration / sc.config.dt));
      for (frame = 1; frame <= steps; ++frame) {
        step(state, sc.config);
        if (ground) {
          const double height = (state.centroid() - ground->point).dot(ground->normal.normalized()) - bottom_offset;
          if (!state.contacts.empty()) touched = true;
          if (touched && state.contacts.empty()) apex = std::max(apex.value_or(height), height);
        }
        if (frame % sc.output_every == 0) write_tracked_row(csv, track(state, ground));
        if (sc.frames_every > 0 && frame % sc.frames_every == 0) {
          std::ostringstream name;
          name << "frame_" << std::setw(6) << std::setfill('0') << frame << ".obj";
          write_obj(dir / name.str(), state.mesh);
        }
      }
      summary["steps"] = steps;
      summary["final_time"] = state.time;
      if (apex) {
        summary["rebound_apex"] = *apex;
        out << "rebound apex " << *apex << " m\n";
      }
      out << "simulated " << state.time << " s in " << steps << " steps; wrote " << (dir / "tracked.csv").string()
          << '\n';
    }
  } catch (const SimulationInstabilityError& e) {
    throw SimulationInstabilityError(std::string(e.what()) + " at frame " + std::to_string(frame), e.face());
  }
  auto file = open_out(dir / "summary.json");
  file << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- mesh-info

struct MeshInfoArgs {
  std::string mesh;
  std::optional<int> seed_vertex;
  std::optional<double> patch_radius;
  std::optional<std::string> out;
};

int cmd_mesh_info(const MeshInfoArgs& a, std::ostream& out, std::ostream& err) {
  const TriMesh mesh = load_mesh(a.mesh);
  json j;
  j["vertices"] = mesh.num_vertices();
  j["faces"] = mesh.num_faces();
  const auto topo = check_watertight(mesh);
  j["watertight"] = topo.watertight;
  j["boundary_edges"] = topo.boundary_edges.size();
  j["surface_area_m2"] = surface_area(mesh);
  j["mean_edge_length_m"] = mean_edge_length(mesh);
  if (topo.watertight) {
    const auto vol = enclosed_volume(mesh);
    j["volume_m3"] = vol.volume;
    j["outward_oriented"] = vol.outward_oriented;
  } else {
    err << "warning: mesh is open (" << topo.boundary_edges.size() << " boundary edges); volume unavailable\n";
  }
  if (a.seed_vertex) {
    const double hint = a.patch_radius ? *a.patch_radius : 4.0 * mean_edge_length(mesh);
    const auto patch = select_patch(mesh, *a.seed_vertex, hint);
    const SphereFit fit = fit_curvature(patch);
    j["curvature"] = {{"seed_vertex", *a.seed_vertex},
                      {"patch_vertices", patch.vertex_ids.size()},
                      {"radius_m", fit.radius},
                      {"rms_residual_m", fit.rms_residual},
                      {"non_uniform", fit.non_uniform}};
    if (fit.non_uniform) err << "warning: patch curvature is not uniform\n";
  }
  write_text(a.out, j.dump(2), out);
  return 0;
}

// ------------------------------------------------------------- synth-series

struct SynthArgs {
  double pressure = 0.0;
  double ks = 0.0;
  double radius = 0.0;
  double thickness = 0.0;
  std::vector<double> depths;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticSeriesSpec spec;
  spec.Pg = a.pressure;
  spec.ks = a.ks;
  spec.R = a.radius;
  spec.h = a.thickness;
  spec.depths = a.depths;
  spec.relative_noise = a.noise;
  spec.seed = a.seed;
  const auto series = synthesize_series(spec);
  if (a.out) {
    const fs::path p(*a.out);
    if (p.has_parent_path()) prepare_dir(p.parent_path().string());
    write_series(p, series);
  } else {
    write_series(out, series);
  }
  return 0;
}

// -------------------------------------------------------------- make-sphere

struct SphereArgs {
  int subdivisions = 3;
  double radius = 0.0;
  std::optional<std::string> out;
};

int cmd_make_sphere(const SphereArgs& a, std::ostream& out) {
  if (a.subdivisions < 0 || a.subdivisions > 7) throw ValidationError("--subdivisions must be in [0, 7]");
  if (!(a.radius > 0.0)) throw ValidationError("--radius must be positive");
  const TriMesh mesh = make_icosphere(a.subdivisions, a.radius);
  if (a.out) {
    const fs::path p(*a.out);
    if (p.has_parent_path()) prepare_dir(p.parent_path().string());
    write_obj(p, mesh);
  } else {
    write_obj(out, mesh);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate gauge pressure and elastic modulus of inflated objects from point indentation"};
  app.name("shellprobe");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for any randomized step")->capture_default_str();

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Fit the scaling factor ks from series at known pressures");
  cal->add_option("--series", ca.series, "Indentation series CSV (repeat)")->required();
  cal->add_option("--pressure", ca.pressures, "Manometer gauge pressure in Pa, one per series")->required();
  cal->add_option("--radius", ca.radii, "Curvature radius in m (once, or once per series)")->required();
  cal->add_option("--thickness", ca.thicknesses, "Shell thickness in m (once, or once per series)")->required();
  cal->add_flag("--average-levels", ca.average_levels, "Average repeated force levels before fitting");
  cal->add_option("--out", ca.out, "Calibration JSON to write");

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Estimate Pg and E for one object");
  est->add_option("--series", ea.series, "Indentation series CSV")->required();
  est->add_option("--calibration", ea.calibration, "Calibration JSON")->required();
  est->add_option("--mesh", ea.mesh, "OBJ mesh used to measure the curvature radius");
  est->add_option("--seed-vertex", ea.seed_vertex, "Mesh vertex at the indentation site");
  est->add_option("--patch-radius", ea.patch_radius, "Patch radius for the curvature fit in m");
  est->add_option("--radius", ea.radius, "Curvature radius in m (instead of --mesh)");
  est->add_option("--thickness", ea.thickness, "Shell thickness in m");
  est->add_option("--wrinkles", ea.wrinkles, "Observed number of radial wrinkles");
  est->add_option("--nu", ea.nu, "Poisson's ratio")->capture_default_str();
  est->add_flag("--average-levels", ea.average_levels, "Average repeated force levels before fitting");
  est->add_option("--out", ea.out, "Estimate JSON to write (stdout when absent)");

  SolveArgs sa;
  auto* sol = app.add_subcommand("solve-shell", "Solve the axisymmetric indentation problem");
  sol->add_option("--radius", sa.radius, "Curvature radius R in m")->required();
  sol->add_option("--thickness", sa.thickness, "Thickness h in m")->required();
  sol->add_option("--pressure", sa.pressure, "Gauge pressure Pg in Pa")->required();
  sol->add_option("--modulus", sa.modulus, "Young's modulus E in Pa");
  sol->add_option("--tau", sa.tau, "Bendability; sets E from R, h, nu and Pg");
  sol->add_option("--nu", sa.nu, "Poisson's ratio")->capture_default_str();
  sol->add_option("--W0", sa.depths, "Dimensionless depth (<= 0); repeat for a sweep");
  sol->add_flag("--critical", sa.critical, "Locate the onset of compressive hoop stress");
  sol->add_flag("--membrane,!--full", sa.membrane, "Drop (default) or keep the bending term")
      ->default_str("--membrane");
  sol->add_option("--grid", sa.grid, "Collocation nodes")->capture_default_str();
  sol->add_option("--rho-inf", sa.rho_inf, "Outer radius in units of the capillary length")->capture_default_str();
  sol->add_option("--out", sa.out, "Output directory")->capture_default_str();

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Run a membrane simulation scenario");
  sim->add_option("--scenario", ma.scenario, "Scenario JSON")->required();
  sim->add_option("--mesh", ma.mesh, "Closed OBJ mesh")->required();
  sim->add_option("--out", ma.out, "Output directory")->capture_default_str();

  MeshInfoArgs ia;
  auto* info = app.add_subcommand("mesh-info", "Report topology, volume and local curvature");
  info->add_option("--mesh", ia.mesh, "OBJ mesh")->required();
  info->add_option("--seed-vertex", ia.seed_vertex, "Vertex for a local curvature fit");
  info->add_option("--patch-radius", ia.patch_radius, "Patch radius in m");
  info->add_option("--out", ia.out, "JSON to write (stdout when absent)");

  SynthArgs ya;
  auto* syn = app.add_subcommand("synth-series", "Write a synthetic indentation series");
  syn->add_option("--pressure", ya.pressure, "Gauge pressure in Pa")->required();
  syn->add_option("--ks", ya.ks, "Scaling factor")->required();
  syn->add_option("--radius", ya.radius, "Curvature radius in m")->required();
  syn->add_option("--thickness", ya.thickness, "Thickness in m")->required();
  syn->add_option("--depth", ya.depths, "Depth in m (repeat)")->required();
  syn->add_option("--noise", ya.noise, "Relative force noise (standard deviation)");
  syn->add_option("--out", ya.out, "CSV to write (stdout when absent)");

  SphereArgs pa;
  auto* sph = app.add_subcommand("make-sphere", "Write an icosphere OBJ");
  sph->add_option("--radius", pa.radius, "Radius in m")->required();
  sph->add_option("--subdivisions", pa.subdivisions, "Subdivision level")->capture_default_str();
  sph->add_option("--out", pa.out, "OBJ to write (stdout when absent)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code_for(ErrorKind::Validation);
  }

  try {
    if (*cal) return cmd_calibrate(ca, out, err);
    if (*est) return cmd_estimate(ea, out, err);
    if (*sol) return cmd_solve_shell(sa, out, err);
    if (*sim) return cmd_simulate(ma, out, err);
    if (*info) return cmd_mesh_info(ia, out, err);
    if (*sph) return cmd_make_sphere(pa, out);
    if (*syn) {
      ya.seed = seed;
      return cmd_synth(ya, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return exit_code_for(ErrorKind::Numerical);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(ErrorKind::Io);
  }
  return exit_code_for(ErrorKind::Validation);
}

}  // namespace shellprobe::cli
