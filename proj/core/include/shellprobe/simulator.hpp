#pragma once

// Explicit dynamics of a closed, pressurized membrane surface.
//
// Each triangle carries a plane-stress compressible Neo-Hookean membrane of
// thickness h. The inflated input mesh is the reference shape: at init a
// per-triangle surface tension is fitted so that tension and gas pressure
// balance at every vertex, and whatever the fit cannot absorb is held as a
// constant nodal load. Without loading the reference shape is therefore an
// exact equilibrium.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shellprobe/geometry.hpp"
#include "shellprobe/measurement.hpp"

namespace shellprobe {

inline constexpr double kAtmosphericPressure = 101325.0;  // Pa

enum class GasModel { ConstantPressure, Isothermal };

struct MaterialSpec {
  double E = 0.0;  // Pa
  double nu = 0.4;
  double h = 0.0;        // m, membrane thickness
  double density = 0.0;  // kg/m^3 of the membrane material
  double Pg0 = 0.0;      // Pa, gauge pressure of the reference shape
  GasModel gas_model = GasModel::ConstantPressure;

  void validate() const;
};

/// Half-space collider; the free side is where (x - point) . normal >= 0.
struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// Point indenter acting on one mesh vertex.
struct Indenter {
  int vertex = -1;             // used when >= 0
  std::optional<Vec3> point;   // otherwise the vertex nearest to this point
  Vec3 axis = -Vec3::UnitZ();  // direction of travel into the surface
  double speed = 0.005;        // m/s while advancing
};

/// Vertex held at a prescribed position for one step.
struct PointConstraint {
  int vertex = -1;
  Vec3 position = Vec3::Zero();
};

struct ScenarioConfig {
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  std::vector<Plane> planes;
  double restitution = 1.0;
  std::optional<Indenter> indenter;
  std::vector<int> pinned;  // vertices fixed at their current position
  std::vector<PointConstraint> constraints;
  double damping = 0.0;   // 1/s, velocities decay as exp(-damping dt)
  double dt = 1e-4;       // s
  double duration = 0.0;  // s

  void validate() const;
};

/// Data fixed at init and shared by every state derived from it.
struct RestState {
  TriMesh mesh;
  MaterialSpec material;
  std::vector<double> masses;               // lumped, per vertex
  std::vector<Eigen::Matrix2d> dm_inverse;  // per face, inverse rest edge matrix
  std::vector<double> areas;                // per face, rest area
  std::vector<double> tension;              // per face, prestress surface tension (N/m)
  std::vector<Vec3> balance_load;           // per vertex, constant load closing equilibrium
  double volume = 0.0;                      // rest enclosed volume
  /// max |balance load| / max |pressure load| at the rest shape.
  double prestress_deviation = 0.0;
};

struct ContactEpisode {
  bool active = false;
  double incoming_speed = 0.0;  // centroid normal velocity when the episode began
};

struct SimState {
  TriMesh mesh;  // current positions, rest connectivity
  std::vector<Vec3> velocities;
  std::vector<Vec3> forces;   // total applied force at the current positions
  bool forces_valid = false;  // forces match positions and the last scenario used
  double volume = 0.0;
  double Pg = 0.0;
  double time = 0.0;
  std::vector<int> contacts;             // vertices touching a plane after the last step
  std::vector<ContactEpisode> episodes;  // one per plane of the scenario
  std::shared_ptr<const RestState> rest;

  const TriMesh& rest_mesh() const { return rest->mesh; }
  double total_mass() const;
  Vec3 centroid() const;           // mass-weighted
  Vec3 centroid_velocity() const;  // mass-weighted
  double kinetic_energy() const;
};

/// Throws TopologyError for meshes that are not closed.
SimState init_sim(const TriMesh& mesh, const MaterialSpec& material);

/// One velocity-Verlet step. Throws SimulationInstabilityError on a
/// collapsed triangle (with its index) or a non-finite state (face -1).
void step(SimState& state, const ScenarioConfig& config);

/// Steps for config.duration seconds, calling
/// `observer` after every step.
void run(SimState& state, const ScenarioConfig& config, const std::function<void(const SimState&)>& observer = {});

struct IndentOptions {
  double depth_step = 1e-3;           // m between recorded samples
  double first_record_depth = 0.0;    // samples shallower than this are not recorded
  double kinetic_tolerance = 1e-6;    // J, quasi-static criterion
  double relaxation_damping = 40.0;   // 1/s, used while relaxing
  int max_relaxation_steps = 100000;  // per increment
  std::string object_id = "virtual";
};

struct IndentProgress {
  double depth = 0.0;
  double force = 0.0;
  int relaxation_steps = 0;
};

/// Displacement-controlled quasi-static indentation along the indenter axis.
/// Depth is the indenter travel minus the mean travel of the pinned vertices.
/// Returns the recorded series with R from `region_radius` and h from the material.
IndentationSeries indent_virtual(SimState& state, const ScenarioConfig& config, double target_depth,
                                 double region_radius, const IndentOptions& options = {},
                                 const std::function<void(const IndentProgress&)>& observer = {});

/// Resolves the indenter to a vertex index.
int indenter_vertex(const SimState& state, const Indenter& indenter);

struct Deformation {
  double H = 0.0;   // extent along the vertical axis
  double Du = 0.0;  // diameter of the rim around the sunken region
  double Dl = 0.0;  // diameter of the contact patch
  double d = 0.0;   // rim height minus apex height
};

/// `ground` is the support plane; its normal is the vertical axis. The
/// sunken region is measured around the vertical line through `axis_point`
/// (the mesh centroid when absent). Throws EmptyContactError if no vertex
/// lies within kContactTolerance of the ground.
inline constexpr double kContactTolerance = 1e-4;
Deformation measure_deformation(const SimState& state, const Plane& ground,
                                std::optional<Vec3> axis_point = std::nullopt);

/// Kinetic + elastic + prestress + gas + gravity + balance-load potential.
double total_energy(const SimState& state, const ScenarioConfig& config);

/// Sum over faces of the gas pressure load, and the sum of magnitudes, for
/// checking that the pressure load on a closed mesh has no net force.
struct PressureBalance {
  Vec3 net = Vec3::Zero();
  double magnitude_sum = 0.0;
};
PressureBalance pressure_balance(const SimState& state);

}  // namespace shellprobe
