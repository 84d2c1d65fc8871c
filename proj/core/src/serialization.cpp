#include "shellprobe/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "shellprobe/error.hpp"

namespace shellprobe {
namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Vec3 vec3(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    throw ValidationError(std::string("field '") + key + "' must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json to_array(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Wrong JSON types surface as validation errors rather than library exceptions.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad JSON content: ") + e.what());
  }
}

}  // namespace

std::string to_json(const Estimate& e) {
  json j;
  j["object_id"] = e.object_id;
  j["Pg_pa"] = e.Pg;
  j["E_pa"] = e.E;
  j["nu"] = e.nu;
  j["ks_used"] = e.ks_used;
  j["diagnostics"] = {{"slope", e.diagnostics.slope},   {"r2", e.diagnostics.slope_r2},
                      {"n", e.diagnostics.n_wrinkles},  {"tau", e.diagnostics.tau},
                      {"Pg_hat", e.diagnostics.Pg_hat}, {"intercept", e.diagnostics.intercept}};
  j["warnings"] = e.warnings;
  return j.dump(2);
}

Estimate estimate_from_json(const std::string& text) {
  const json j = parse_text(text);
  return guarded([&] {
    Estimate e;
    const json& id = field(j, "object_id");
    if (!id.is_string()) throw ValidationError("field 'object_id' must be a string");
    e.object_id = id.get<std::string>();
    e.Pg = number(j, "Pg_pa");
    e.E = number(j, "E_pa");
    e.nu = number(j, "nu");
    e.ks_used = number(j, "ks_used");
    const json& d = field(j, "diagnostics");
    e.diagnostics.slope = number(d, "slope");
    e.diagnostics.slope_r2 = number(d, "r2");
    e.diagnostics.n_wrinkles = static_cast<int>(number(d, "n"));
    e.diagnostics.tau = number(d, "tau");
    e.diagnostics.Pg_hat = number_or(d, "Pg_hat", 0.0);
    e.diagnostics.intercept = number_or(d, "intercept", 0.0);
    if (j.contains("warnings")) e.warnings = j.at("warnings").get<std::vector<std::string>>();
    return e;
  });
}

std::string to_json(const Calibration& c) {
  json records = json::array();
  for (const auto& r : c.records) {
    records.push_back({{"measured_Pg", r.measured_Pg}, {"estimated_Pg_hat", r.estimated_Pg_hat}});
  }
  json j;
  j["ks"] = c.ks;
  j["fit_r2"] = c.fit_r2;
  j["records"] = records;
  return j.dump(2);
}

Calibration calibration_from_json(const std::string& text) {
  const json j = parse_text(text);
  return guarded([&] {
    Calibration c;
    c.ks = number(j, "ks");
    if (!(c.ks > 0.0)) throw ValidationError("calibration ks must be positive");
    c.fit_r2 = number_or(j, "fit_r2", std::numeric_limits<double>::quiet_NaN());
    if (j.contains("records")) {
      const json& records = j.at("records");
      if (!records.is_array()) throw ValidationError("field 'records' must be an array");
      for (const auto& r : records) {
        c.records.push_back({number(r, "measured_Pg"), number(r, "estimated_Pg_hat")});
      }
    }
    return c;
  });
}

Calibration read_calibration(const std::filesystem::path& path) { return calibration_from_json(slurp(path)); }

Scenario scenario_from_json(const std::string& text) {
  const json j = parse_text(text);
  return guarded([&] {
    Scenario s;
    const json& m = field(j, "material");
    s.material.E = number(m, "E");
    s.material.nu = number_or(m, "nu", 0.4);
    s.material.h = number(m, "h");
    s.material.density = number(m, "density");
    s.material.Pg0 = number(m, "Pg0");
    if (m.contains("gas_model")) {
      const std::string model = m.at("gas_model").get<std::string>();
      if (model == "constant_pressure") {
        s.material.gas_model = GasModel::ConstantPressure;
      } else if (model == "isothermal") {
        s.material.gas_model = GasModel::Isothermal;
      } else {
        throw ValidationError("gas_model must be 'constant_pressure' or 'isothermal'");
      }
    }
    s.material.validate();

    ScenarioConfig& c = s.config;
    if (j.contains("gravity")) c.gravity = vec3(j, "gravity");
    if (j.contains("planes")) {
      for (const auto& p : j.at("planes")) c.planes.push_back({vec3(p, "point"), vec3(p, "normal")});
    }
    c.restitution = number_or(j, "restitution", 1.0);
    c.damping = number_or(j, "damping", 0.0);
    c.dt = number_or(j, "dt", 1e-4);
    c.duration = number_or(j, "duration", 0.0);
    if (j.contains("pinned")) c.pinned = j.at("pinned").get<std::vector<int>>();
    if (j.contains("pin_below")) s.pin_below = number(j, "pin_below");
    if (j.contains("indenter")) {
      const json& ij = j.at("indenter");
      Indenter ind;
      if (ij.contains("vertex")) ind.vertex = static_cast<int>(number(ij, "vertex"));
      if (ij.contains("point")) ind.point = vec3(ij, "point");
      if (ij.contains("axis")) ind.axis = vec3(ij, "axis");
      ind.speed = number_or(ij, "speed", ind.speed);
      if (ind.vertex < 0 && !ind.point) throw ValidationError("indenter needs 'vertex' or 'point'");
      c.indenter = ind;
    }
    c.validate();

    if (j.contains("drop_height")) s.drop_height = number(j, "drop_height");
    if (j.contains("initial_velocity")) s.initial_velocity = vec3(j, "initial_velocity");
    if (j.contains("indentation")) {
      const json& ij = j.at("indentation");
      IndentationPlan plan;
      plan.target_depth = number(ij, "target_depth");
      plan.region_radius = number(ij, "region_radius");
      plan.options.depth_step = number_or(ij, "depth_step", plan.options.depth_step);
      plan.options.first_record_depth = number_or(ij, "first_record_depth", plan.options.first_record_depth);
      plan.options.kinetic_tolerance = number_or(ij, "kinetic_tolerance", plan.options.kinetic_tolerance);
      plan.options.relaxation_damping = number_or(ij, "relaxation_damping", plan.options.relaxation_damping);
      plan.options.max_relaxation_steps =
          static_cast<int>(number_or(ij, "max_relaxation_steps", plan.options.max_relaxation_steps));
      if (ij.contains("object_id")) plan.options.object_id = ij.at("object_id").get<std::string>();
      if (!c.indenter) throw ValidationError("'indentation' requires an 'indenter'");
      s.indentation = plan;
    }
    s.output_every = static_cast<int>(number_or(j, "output_every", 1));
    s.frames_every = static_cast<int>(number_or(j, "frames_every", 0));
    if (s.output_every < 1) throw ValidationError("output_every must be at least 1");
    if (s.frames_every < 0) throw ValidationError("frames_every must be non-negative");
    return s;
  });
}

Scenario read_scenario(const std::filesystem::path& path) { return scenario_from_json(slurp(path)); }

std::string to_json(const Scenario& s) {
  json j;
  j["material"] = {{"E", s.material.E},
                   {"nu", s.material.nu},
                   {"h", s.material.h},
                   {"density", s.material.density},
                   {"Pg0", s.material.Pg0},
                   {"gas_model", s.material.gas_model == GasModel::Isothermal ? "isothermal" : "constant_pressure"}};
  const ScenarioConfig& c = s.config;
  j["gravity"] = to_array(c.gravity);
  j["planes"] = json::array();
  for (const auto& p : c.planes) j["planes"].push_back({{"point", to_array(p.point)}, {"normal", to_array(p.normal)}});
  j["restitution"] = c.restitution;
  j["damping"] = c.damping;
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  if (!c.pinned.empty()) j["pinned"] = c.pinned;
  if (s.pin_below) j["pin_below"] = *s.pin_below;
  if (c.indenter) {
    json ij = {{"axis", to_array(c.indenter->axis)}, {"speed", c.indenter->speed}};
    if (c.indenter->vertex >= 0) ij["vertex"] = c.indenter->vertex;
    if (c.indenter->point) ij["point"] = to_array(*c.indenter->point);
    j["indenter"] = ij;
  }
  if (s.drop_height) j["drop_height"] = *s.drop_height;
  j["initial_velocity"] = to_array(s.initial_velocity);
  if (s.indentation) {
    const auto& p = *s.indentation;
    j["indentation"] = {{"target_depth", p.target_depth},
                        {"region_radius", p.region_radius},
                        {"depth_step", p.options.depth_step},
                        {"first_record_depth", p.options.first_record_depth},
                        {"kinetic_tolerance", p.options.kinetic_tolerance},
                        {"relaxation_damping", p.options.relaxation_damping},
                        {"max_relaxation_steps", p.options.max_relaxation_steps},
                        {"object_id", p.options.object_id}};
  }
  j["output_every"] = s.output_every;
  j["frames_every"] = s.frames_every;
  return j.dump(2);
}

TriMesh place_mesh(const TriMesh& mesh, Scenario& s) {
  TriMesh out = mesh;
  if (s.drop_height) {
    if (s.config.planes.empty()) throw ValidationError("drop_height needs a ground plane");
    const Plane& g = s.config.planes.front();
    const Vec3 up = g.normal.normalized();
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& v : out.vertices) lowest = std::min(lowest, (v - g.point).dot(up));
    const Vec3 shift = (*s.drop_height - lowest) * up;
    for (auto& v : out.vertices) v += shift;
  }
  if (s.pin_below) {
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
      if (out.vertices[i].z() < *s.pin_below) s.config.pinned.push_back(static_cast<int>(i));
    }
    std::sort(s.config.pinned.begin(), s.config.pinned.end());
    s.config.pinned.erase(std::unique(s.config.pinned.begin(), s.config.pinned.end()), s.config.pinned.end());
  }
  for (int v : s.config.pinned) {
    if (v < 0 || static_cast<std::size_t>(v) >= out.vertices.size()) {
      throw IndexError("pinned vertex " + std::to_string(v) + " out of range");
    }
  }
  return out;
}

TrackedFrame track(const SimState& state, const std::optional<Plane>& ground) {
  TrackedFrame f;
  f.time = state.time;
  f.centroid = state.centroid();
  f.volume = state.volume;
  f.Pg = state.Pg;
  f.Dl = std::numeric_limits<double>::quiet_NaN();
  if (ground) {
    try {
      f.deformation = measure_deformation(state, *ground);
      f.Dl = f.deformation->Dl;
    } catch (const EmptyContactError&) {
      // Airborne: H, Du and d are still meaningful.
      Plane far = *ground;
      double lowest = std::numeric_limits<double>::infinity();
      const Vec3 up = ground->normal.normalized();
      for (const auto& v : state.mesh.vertices) lowest = std::min(lowest, (v - ground->point).dot(up));
      far.point = ground->point + lowest * up;
      f.deformation = measure_deformation(state, far);
    }
  }
  return f;
}

void write_tracked_header(std::ostream& out) { out << "time,cx,cy,cz,H,Du,Dl,d,volume,Pg\n"; }

void write_tracked_row(std::ostream& out, const TrackedFrame& f) {
  const auto old_precision = out.precision(12);
  auto put = [&](double v) {
    if (std::isfinite(v)) {
      out << v;
    } else {
      out << "nan";
    }
  };
  out << f.time << ',' << f.centroid.x() << ',' << f.centroid.y() << ',' << f.centroid.z() << ',';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  put(f.deformation ? f.deformation->H : nan);
  out << ',';
  put(f.deformation ? f.deformation->Du : nan);
  out << ',';
  put(f.Dl);
  out << ',';
  put(f.deformation ? f.deformation->d : nan);
  out << ',';
  put(f.volume);
  out << ',';
  put(f.Pg);
  out << '\n';
  out.precision(old_precision);
}

}  // namespace shellprobe
