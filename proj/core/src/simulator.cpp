#include "shellprobe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "shellprobe/error.hpp"

namespace shellprobe {
namespace {

Vec3 area_vector(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a); }

// Gradient of the triangle area with respect to corner i, per unit tension.
// Corners are (x0, x1, x2) counter-clockwise; dA/dx_i = n x (x_{i-1} - x_{i+1}) / 2.
std::array<Vec3, 3> area_gradient(const std::array<Vec3, 3>& x) {
  Vec3 n = (x[1] - x[0]).cross(x[2] - x[0]);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  std::array<Vec3, 3> g;
  for (int i = 0; i < 3; ++i) g[i] = 0.5 * n.cross(x[(i + 2) % 3] - x[(i + 1) % 3]);
  return g;
}

std::array<Vec3, 3> corners(const TriMesh& m, std::size_t f) {
  const auto& t = m.faces[f];
  return {m.vertices[static_cast<std::size_t>(t[0])], m.vertices[static_cast<std::size_t>(t[1])],
          m.vertices[static_cast<std::size_t>(t[2])]};
}

void add_pressure(const TriMesh& m, double Pg, std::vector<Vec3>& f) {
  for (std::size_t e = 0; e < m.faces.size(); ++e) {
    const auto x = corners(m, e);
    const Vec3 load = Pg * area_vector(x[0], x[1], x[2]) / 3.0;
    for (int i = 0; i < 3; ++i) f[static_cast<std::size_t>(m.faces[e][i])] += load;
  }
}

void add_tension(const TriMesh& m, const std::vector<double>& tension, std::vector<Vec3>& f) {
  for (std::size_t e = 0; e < m.faces.size(); ++e) {
    if (tension[e] == 0.0) continue;
    const auto g = area_gradient(corners(m, e));
    for (int i = 0; i < 3; ++i) f[static_cast<std::size_t>(m.faces[e][i])] -= tension[e] * g[i];
  }
}

struct Lame {
  double mu;
  double lambda;  // plane-stress value E nu / (1 - nu^2)
};

Lame lame(const MaterialSpec& m) { return {m.E / (2.0 * (1.0 + m.nu)), m.E * m.nu / (1.0 - m.nu * m.nu)}; }

// Membrane forces (added to f when non-null) and elastic energy.
double add_membrane(const RestState& rest, const TriMesh& m, std::vector<Vec3>* f) {
  const Lame L = lame(rest.material);
  const double h = rest.material.h;
  double energy = 0.0;
  for (std::size_t e = 0; e < m.faces.size(); ++e) {
    const auto x = corners(m, e);
    Eigen::Matrix<double, 3, 2> Ds;
    Ds.col(0) = x[1] - x[0];
    Ds.col(1) = x[2] - x[0];
    const Eigen::Matrix<double, 3, 2> F = Ds * rest.dm_inverse[e];
    const Eigen::Matrix2d C = F.transpose() * F;
    const double detC = C.determinant();
    if (!(detC > 1e-12)) {
      throw SimulationInstabilityError("triangle " + std::to_string(e) + " collapsed", static_cast<int>(e));
    }
    const double lnJ = 0.5 * std::log(detC);
    energy += h * rest.areas[e] * (0.5 * L.mu * (C.trace() - 2.0) - L.mu * lnJ + 0.5 * L.lambda * lnJ * lnJ);
    if (f == nullptr) continue;
    const Eigen::Matrix<double, 3, 2> P = L.mu * F + (L.lambda * lnJ - L.mu) * F * C.inverse();
    const Eigen::Matrix<double, 3, 2> H = -h * rest.areas[e] * P * rest.dm_inverse[e].transpose();
    const auto& t = m.faces[e];
    (*f)[static_cast<std::size_t>(t[1])] += H.col(0);
    (*f)[static_cast<std::size_t>(t[2])] += H.col(1);
    (*f)[static_cast<std::size_t>(t[0])] -= H.col(0) + H.col(1);
  }
  return energy;
}

double gauge_pressure(const RestState& rest, double volume) {
  if (rest.material.gas_model == GasModel::ConstantPressure) return rest.material.Pg0;
  return (kAtmosphericPressure + rest.material.Pg0) * rest.volume / volume - kAtmosphericPressure;
}

void compute_forces(SimState& s, const ScenarioConfig& config) {
  const RestState& rest = *s.rest;
  const std::size_t n = s.mesh.vertices.size();
  s.forces.assign(n, Vec3::Zero());
  add_membrane(rest, s.mesh, &s.forces);
  add_tension(s.mesh, rest.tension, s.forces);
  add_pressure(s.mesh, s.Pg, s.forces);
  for (std::size_t i = 0; i < n; ++i) {
    s.forces[i] += rest.masses[i] * config.gravity + rest.balance_load[i];
  }
}

// Per-face tensions that best balance the pressure load, pulled weakly
// towards the best uniform tension so that the normal equations stay definite.
std::vector<double> fit_prestress(const TriMesh& m, const std::vector<Vec3>& pressure) {
  const std::size_t nv = m.vertices.size();
  const std::size_t nf = m.faces.size();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nf * 9);
  std::vector<Vec3> uniform(nv, Vec3::Zero());
  for (std::size_t e = 0; e < nf; ++e) {
    const auto g = area_gradient(corners(m, e));
    for (int i = 0; i < 3; ++i) {
      const auto v = static_cast<std::size_t>(m.faces[e][i]);
      uniform[v] -= g[i];
      for (int k = 0; k < 3; ++k) {
        trips.emplace_back(static_cast<int>(3 * v) + k, static_cast<int>(e), -g[i](k));
      }
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    num -= uniform[v].dot(pressure[v]);
    den += uniform[v].squaredNorm();
  }
  const double mean_tension = den > 0.0 ? num / den : 0.0;

  Eigen::SparseMatrix<double> G(static_cast<Eigen::Index>(3 * nv), static_cast<Eigen::Index>(nf));
  G.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd p(static_cast<Eigen::Index>(3 * nv));
  for (std::size_t v = 0; v < nv; ++v) p.segment<3>(static_cast<Eigen::Index>(3 * v)) = pressure[v];

  Eigen::SparseMatrix<double> normal = G.transpose() * G;
  double trace = 0.0;
  for (Eigen::Index i = 0; i < normal.rows(); ++i) trace += normal.coeff(i, i);
  const double eps = 1e-8 * trace / static_cast<double>(nf);
  Eigen::SparseMatrix<double> identity(normal.rows(), normal.cols());
  identity.setIdentity();
  normal += eps * identity;
  const Eigen::VectorXd rhs =
      -(G.transpose() * p) + eps * Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nf), mean_tension);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(normal);
  std::vector<double> tension(nf, std::max(mean_tension, 0.0));
  if (solver.info() != Eigen::Success) return tension;
  const Eigen::VectorXd gamma = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !gamma.allFinite()) return tension;
  for (std::size_t e = 0; e < nf; ++e) tension[e] = std::max(gamma(static_cast<Eigen::Index>(e)), 0.0);
  return tension;
}

bool is_fixed(const std::vector<char>& fixed, std::size_t i) { return fixed[i] != 0; }

}  // namespace

void MaterialSpec::validate() const {
  if (!(E > 0.0) || !std::isfinite(E)) throw ValidationError("material E must be positive");
  if (!(nu > 0.0 && nu < 0.5)) throw ValidationError("material nu must lie in (0, 0.5)");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("material thickness must be positive");
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw ValidationError("material density must be positive");
  }
  if (!(Pg0 > 0.0) || !std::isfinite(Pg0)) throw ValidationError("initial gauge pressure must be positive");
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(restitution > 0.0 && restitution <= 1.0)) {
    throw ValidationError("restitution must lie in (0, 1]");
  }
  if (!(damping >= 0.0)) throw ValidationError("damping must be non-negative");
  if (!(duration >= 0.0)) throw ValidationError("duration must be non-negative");
  if (!gravity.allFinite()) throw ValidationError("gravity must be finite");
  for (const auto& p : planes) {
    if (!(p.normal.norm() > 0.0)) throw ValidationError("plane normal must be non-zero");
  }
  if (indenter) {
    if (!(indenter->axis.norm() > 0.0)) throw ValidationError("indenter axis must be non-zero");
    if (!(indenter->speed > 0.0)) throw ValidationError("indenter speed must be positive");
  }
}

double SimState::total_mass() const { return std::accumulate(rest->masses.begin(), rest->masses.end(), 0.0); }

Vec3 SimState::centroid() const {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) c += rest->masses[i] * mesh.vertices[i];
  return c / total_mass();
}

Vec3 SimState::centroid_velocity() const {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < velocities.size(); ++i) c += rest->masses[i] * velocities[i];
  return c / total_mass();
}

double SimState::kinetic_energy() const {
  double k = 0.0;
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    k += 0.5 * rest->masses[i] * velocities[i].squaredNorm();
  }
  return k;
}

SimState init_sim(const TriMesh& mesh, const MaterialSpec& material) {
  material.validate();
  mesh.validate();
  const auto topo = check_watertight(mesh);
  if (!topo.watertight) {
    throw TopologyError(
        "simulation needs a closed surface; found " + std::to_string(topo.boundary_edges.size()) + " boundary edges",
        topo.boundary_edges);
  }
  auto rest = std::make_shared<RestState>();
  rest->mesh = mesh;
  if (signed_volume(rest->mesh) < 0.0) {
    for (auto& f : rest->mesh.faces) std::swap(f[1], f[2]);
  }
  rest->material = material;
  const TriMesh& m = rest->mesh;
  const std::size_t nv = m.vertices.size();
  const std::size_t nf = m.faces.size();

  rest->masses.assign(nv, 0.0);
  rest->areas.resize(nf);
  rest->dm_inverse.resize(nf);
  for (std::size_t e = 0; e < nf; ++e) {
    const auto x = corners(m, e);
    const Vec3 e1 = x[1] - x[0];
    const Vec3 e2 = x[2] - x[0];
    const double area = 0.5 * e1.cross(e2).norm();
    if (!(area > 0.0)) {
      throw SimulationInstabilityError("rest triangle " + std::to_string(e) + " has zero area", static_cast<int>(e));
    }
    const Vec3 t1 = e1.normalized();
    const Vec3 t2 = e1.cross(e2).normalized().cross(t1);
    Eigen::Matrix2d Dm;
    Dm << e1.dot(t1), e2.dot(t1), 0.0, e2.dot(t2);
    rest->dm_inverse[e] = Dm.inverse();
    rest->areas[e] = area;
    for (int i = 0; i < 3; ++i) {
      rest->masses[static_cast<std::size_t>(m.faces[e][i])] += material.density * material.h * area / 3.0;
    }
  }
  for (std::size_t i = 0; i < nv; ++i) {
    if (!(rest->masses[i] > 0.0)) {
      throw ValidationError("vertex " + std::to_string(i) + " belongs to no face");
    }
  }
  rest->volume = signed_volume(m);

  std::vector<Vec3> pressure(nv, Vec3::Zero());
  add_pressure(m, material.Pg0, pressure);
  rest->tension = fit_prestress(m, pressure);
  std::vector<Vec3> internal = pressure;
  add_tension(m, rest->tension, internal);
  rest->balance_load.resize(nv);
  double max_balance = 0.0;
  double max_pressure = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    rest->balance_load[i] = -internal[i];
    max_balance = std::max(max_balance, internal[i].norm());
    max_pressure = std::max(max_pressure, pressure[i].norm());
  }
  rest->prestress_deviation = max_pressure > 0.0 ? max_balance / max_pressure : 0.0;

  SimState s;
  s.rest = rest;
  s.mesh = rest->mesh;
  s.velocities.assign(nv, Vec3::Zero());
  s.volume = rest->volume;
  s.Pg = material.Pg0;
  s.forces.assign(nv, Vec3::Zero());
  return s;
}

void step(SimState& s, const ScenarioConfig& config) {
  const RestState& rest = *s.rest;
  const std::size_t n = s.mesh.vertices.size();
  if (s.forces.size() != n) s.forces.assign(n, Vec3::Zero());
  if (s.episodes.size() != config.planes.size()) s.episodes.assign(config.planes.size(), {});
  if (!s.forces_valid) compute_forces(s, config);

  std::vector<char> fixed(n, 0);
  for (int v : config.pinned) fixed.at(static_cast<std::size_t>(v)) = 1;
  for (const auto& c : config.constraints) fixed.at(static_cast<std::size_t>(c.vertex)) = 1;

  const double dt = config.dt;
  const double decay = std::exp(-config.damping * dt);
  const Vec3 vc_start = s.centroid_velocity();

  for (std::size_t i = 0; i < n; ++i) {
    if (is_fixed(fixed, i)) continue;
    s.velocities[i] += 0.5 * dt * s.forces[i] / rest.masses[i];
    s.velocities[i] *= decay;
    s.mesh.vertices[i] += dt * s.velocities[i];
  }
  for (int v : config.pinned) s.velocities[static_cast<std::size_t>(v)].setZero();
  for (const auto& c : config.constraints) {
    auto& x = s.mesh.vertices[static_cast<std::size_t>(c.vertex)];
    s.velocities[static_cast<std::size_t>(c.vertex)] = (c.position - x) / dt;
    x = c.position;
  }

  s.contacts.clear();
  std::vector<char> plane_hit(config.planes.size(), 0);
  for (std::size_t p = 0; p < config.planes.size(); ++p) {
    const Vec3 normal = config.planes[p].normal.normalized();
    for (std::size_t i = 0; i < n; ++i) {
      if (is_fixed(fixed, i)) continue;
      const double dist = (s.mesh.vertices[i] - config.planes[p].point).dot(normal);
      if (dist > 0.0) continue;
      s.mesh.vertices[i] -= dist * normal;
      const double vn = s.velocities[i].dot(normal);
      if (vn < 0.0) s.velocities[i] -= vn * normal;
      s.contacts.push_back(static_cast<int>(i));
      plane_hit[p] = 1;
    }
  }
  std::sort(s.contacts.begin(), s.contacts.end());
  s.contacts.erase(std::unique(s.contacts.begin(), s.contacts.end()), s.contacts.end());

  s.volume = signed_volume(s.mesh);
  if (!(s.volume > 0.0)) throw SimulationInstabilityError("enclosed volume became non-positive", -1);
  s.Pg = gauge_pressure(rest, s.volume);
  compute_forces(s, config);
  s.forces_valid = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_fixed(fixed, i)) continue;
    s.velocities[i] += 0.5 * dt * s.forces[i] / rest.masses[i];
  }

  // Contact episodes: the centroid leaves with -restitution times the normal
  // velocity it arrived with.
  for (std::size_t p = 0; p < config.planes.size(); ++p) {
    const Vec3 normal = config.planes[p].normal.normalized();
    auto& ep = s.episodes[p];
    if (!ep.active && plane_hit[p]) {
      ep.active = true;
      ep.incoming_speed = vc_start.dot(normal);
      continue;
    }
    if (!ep.active || plane_hit[p]) continue;
    const double vn = s.centroid_velocity().dot(normal);
    if (vn <= 0.0) continue;
    ep.active = false;
    if (ep.incoming_speed >= 0.0) continue;
    const double delta = -config.restitution * ep.incoming_speed - vn;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_fixed(fixed, i)) s.velocities[i] += delta * normal;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!s.mesh.vertices[i].allFinite() || !s.velocities[i].allFinite()) {
      throw SimulationInstabilityError("non-finite state at vertex " + std::to_string(i), -1);
    }
  }
  s.time += dt;
}

void run(SimState& s, const ScenarioConfig& config, const std::function<void(const SimState&)>& observer) {
  config.validate();
  const auto steps = static_cast<long>(std::llround(config.duration / config.dt));
  for (long k = 0; k < steps; ++k) {
    step(s, config);
    if (observer) observer(s);
  }
}

int indenter_vertex(const SimState& s, const Indenter& indenter) {
  const auto n = static_cast<int>(s.mesh.vertices.size());
  if (indenter.vertex >= 0) {
    if (indenter.vertex >= n) {
      throw IndexError("indenter vertex " + std::to_string(indenter.vertex) + " out of range");
    }
    return indenter.vertex;
  }
  if (!indenter.point) throw ValidationError("indenter needs a vertex or a point");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double d = (s.mesh.vertices[static_cast<std::size_t>(i)] - *indenter.point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

IndentationSeries indent_virtual(SimState& s, const ScenarioConfig& config, double target_depth, double region_radius,
                                 const IndentOptions& options,
                                 const std::function<void(const IndentProgress&)>& observer) {
  config.validate();
  if (!config.indenter) throw ValidationError("scenario has no indenter");
  if (!(options.depth_step > 0.0)) throw ValidationError("depth step must be positive");
  if (!(config.indenter->speed <= 0.01)) {
    throw ValidationError("indenter speed above 0.01 m/s is not quasi-static");
  }
  const double first = std::max(options.first_record_depth, options.depth_step);
  const long increments = std::isfinite(target_depth) && target_depth > 0.0
                              ? static_cast<long>(std::floor(target_depth / options.depth_step + 1e-9))
                              : 0;
  long recordable = 0;
  for (long i = 1; i <= increments; ++i) {
    if (static_cast<double>(i) * options.depth_step >= first - 1e-12) ++recordable;
  }
  if (recordable < static_cast<long>(IndentationSeries::kMinSamples)) {
    throw InsufficientDataError("target depth yields fewer than " + std::to_string(IndentationSeries::kMinSamples) +
                                " samples");
  }

  const int k = indenter_vertex(s, *config.indenter);
  const Vec3 axis = config.indenter->axis.normalized();
  ScenarioConfig cfg = config;
  cfg.damping = std::max(config.damping, options.relaxation_damping);
  cfg.constraints.clear();

  auto relax = [&](double depth) {
    int steps = 0;
    do {
      step(s, cfg);
      ++steps;
      if (steps > options.max_relaxation_steps) {
        std::ostringstream msg;
        msg << "no quasi-static equilibrium at depth " << depth << " m within " << options.max_relaxation_steps
            << " steps (kinetic energy " << s.kinetic_energy() << " J)";
        throw RelaxationTimeoutError(msg.str());
      }
    } while (s.kinetic_energy() >= options.kinetic_tolerance);
    return steps;
  };

  relax(0.0);  // settle under gravity and contacts before the indenter engages
  const Vec3 x0 = s.mesh.vertices[static_cast<std::size_t>(k)];
  std::vector<Vec3> pin0;
  for (int v : config.pinned) pin0.push_back(s.mesh.vertices[static_cast<std::size_t>(v)]);
  auto reference_travel = [&]() {
    if (pin0.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < pin0.size(); ++j) {
      sum += (s.mesh.vertices[static_cast<std::size_t>(config.pinned[j])] - pin0[j]).dot(axis);
    }
    return sum / static_cast<double>(pin0.size());
  };

  std::vector<IndentationSample> samples;
  double travel = 0.0;
  const double advance = config.indenter->speed * cfg.dt;
  for (long i = 1; i <= increments; ++i) {
    const double target = static_cast<double>(i) * options.depth_step;
    while (travel < target) {
      travel = std::min(target, travel + advance);
      cfg.constraints = {{k, x0 + travel * axis}};
      step(s, cfg);
    }
    const int steps = relax(target);
    const double force = -s.forces[static_cast<std::size_t>(k)].dot(axis);
    const double depth = travel - reference_travel();
    if (observer) observer({depth, force, steps});
    if (target >= first - 1e-12) samples.push_back({force, depth});
  }
  return IndentationSeries(std::move(samples), options.object_id, region_radius, s.rest->material.h);
}

Deformation measure_deformation(const SimState& s, const Plane& ground, std::optional<Vec3> axis_point) {
  const Vec3 up = ground.normal.normalized();
  const auto& xs = s.mesh.vertices;
  std::vector<double> z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - ground.point).dot(up);
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  Deformation out;
  out.H = *hi - *lo;

  std::vector<Vec3> contact;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (z[i] <= kContactTolerance) contact.push_back(xs[i] - z[i] * up);
  }
  if (contact.empty()) throw EmptyContactError("no vertex touches the ground plane");
  for (std::size_t a = 0; a < contact.size(); ++a) {
    for (std::size_t b = a + 1; b < contact.size(); ++b) {
      out.Dl = std::max(out.Dl, (contact[a] - contact[b]).norm());
    }
  }

  const Vec3 center = axis_point ? *axis_point : s.centroid();
  const double mid = (center - ground.point).dot(up);
  const double width = mean_edge_length(s.mesh);
  double apex_r = std::numeric_limits<double>::infinity();
  double apex_z = 0.0;
  std::vector<double> bin_z;
  std::vector<double> bin_r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (z[i] <= mid) continue;
    const Vec3 rel = xs[i] - center;
    const double r = (rel - rel.dot(up) * up).norm();
    if (r < apex_r) {
      apex_r = r;
      apex_z = z[i];
    }
    const auto bin = static_cast<std::size_t>(r / width);
    if (bin >= bin_z.size()) {
      bin_z.resize(bin + 1, -std::numeric_limits<double>::infinity());
      bin_r.resize(bin + 1, 0.0);
    }
    if (z[i] > bin_z[bin]) {
      bin_z[bin] = z[i];
      bin_r[bin] = r;
    }
  }
  if (bin_z.empty()) return out;
  const auto rim = static_cast<std::size_t>(std::max_element(bin_z.begin(), bin_z.end()) - bin_z.begin());
  out.Du = 2.0 * bin_r[rim];
  out.d = std::max(0.0, bin_z[rim] - apex_z);
  return out;
}

double total_energy(const SimState& s, const ScenarioConfig& config) {
  const RestState& rest = *s.rest;
  double e = s.kinetic_energy() + add_membrane(rest, s.mesh, nullptr);
  for (std::size_t f = 0; f < s.mesh.faces.size(); ++f) e += rest.tension[f] * face_area(s.mesh, f);
  if (rest.material.gas_model == GasModel::ConstantPressure) {
    e -= rest.material.Pg0 * s.volume;
  } else {
    e -=
        (kAtmosphericPressure + rest.material.Pg0) * rest.volume * std::log(s.volume) - kAtmosphericPressure * s.volume;
  }
  for (std::size_t i = 0; i < s.mesh.vertices.size(); ++i) {
    e -= (rest.masses[i] * config.gravity + rest.balance_load[i]).dot(s.mesh.vertices[i]);
  }
  return e;
}

PressureBalance pressure_balance(const SimState& s) {
  std::vector<Vec3> f(s.mesh.vertices.size(), Vec3::Zero());
  add_pressure(s.mesh, s.Pg, f);
  PressureBalance out;
  for (const auto& v : f) {
    out.net += v;
    out.magnitude_sum += v.norm();
  }
  return out;
}

}  // namespace shellprobe
