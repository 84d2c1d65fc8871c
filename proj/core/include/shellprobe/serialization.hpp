#pragma once

// JSON and CSV forms of estimator results, calibrations, simulation
// scenarios and tracked simulation quantities.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shellprobe/estimator.hpp"
#include "shellprobe/simulator.hpp"

namespace shellprobe {

/// {object_id, Pg_pa, E_pa, nu, ks_used, diagnostics{slope, r2, n, tau, Pg_hat, intercept}, warnings}
std::string to_json(const Estimate& estimate);
/// {ks, fit_r2, records[{measured_Pg, estimated_Pg_hat}]}
std::string to_json(const Calibration& calibration);

/// Throws ParseError (with line) on malformed JSON, ValidationError on missing
/// or out-of-range fields.
Calibration calibration_from_json(const std::string& text);
Calibration read_calibration(const std::filesystem::path& path);
Estimate estimate_from_json(const std::string& text);

/// Parameters of a virtual indentation run.
struct IndentationPlan {
  double target_depth = 0.0;   // m
  double region_radius = 0.0;  // m, curvature radius written into the series
  IndentOptions options;
};

/// Everything a simulation run needs besides the mesh.
struct Scenario {
  MaterialSpec material;
  ScenarioConfig config;
  /// Lift the mesh so its lowest point is this far above the first plane.
  std::optional<double> drop_height;
  Vec3 initial_velocity = Vec3::Zero();
  /// Pin every vertex whose z coordinate (after placement) is below this value.
  std::optional<double> pin_below;
  std::optional<IndentationPlan> indentation;
  int output_every = 1;  // steps between tracked rows
  int frames_every = 0;  // steps between OBJ frames, 0 for none
};

Scenario scenario_from_json(const std::string& text);
Scenario read_scenario(const std::filesystem::path& path);
std::string to_json(const Scenario& scenario);

/// Moves `mesh` according to scenario.drop_height and fills config.pinned
/// from pin_below. Returns the placed mesh.
TriMesh place_mesh(const TriMesh& mesh, Scenario& scenario);

struct TrackedFrame {
  double time = 0.0;
  Vec3 centroid = Vec3::Zero();
  std::optional<Deformation> deformation;  // empty without a ground plane
  double Dl = 0.0;                         // NaN while airborne
  double volume = 0.0;
  double Pg = 0.0;
};

/// Samples the state; deformation quantities are measured against `ground` when given.
TrackedFrame track(const SimState& state, const std::optional<Plane>& ground);

/// CSV header `time,cx,cy,cz,H,Du,Dl,d,volume,Pg`; unavailable values are written as `nan`.
void write_tracked_header(std::ostream& out);
void write_tracked_row(std::ostream& out, const TrackedFrame& frame);

}  // namespace shellprobe
