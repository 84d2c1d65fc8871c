#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "shellprobe/error.hpp"
#include "shellprobe/serialization.hpp"

using namespace shellprobe;
using nlohmann::json;

TEST(EstimateJson, FieldsAndRoundTrip) {
  Estimate e;
  e.object_id = "ball";
  e.Pg = 1300.5;
  e.E = 2.34e6;
  e.ks_used = 0.64;
  e.diagnostics = {241.3, 0.998, 832.1, 0.01, 8, 36.2};
  e.warnings = {"low tau"};
  const auto j = json::parse(to_json(e));
  for (const char* key : {"object_id", "Pg_pa", "E_pa", "nu", "ks_used", "diagnostics", "warnings"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const char* key : {"slope", "r2", "n", "tau"}) EXPECT_TRUE(j["diagnostics"].contains(key)) << key;
  EXPECT_EQ(j["diagnostics"]["n"], 8);

  const auto back = estimate_from_json(to_json(e));
  EXPECT_EQ(back.object_id, "ball");
  EXPECT_EQ(back.Pg, e.Pg);
  EXPECT_EQ(back.E, e.E);
  EXPECT_EQ(back.diagnostics.tau, e.diagnostics.tau);
  EXPECT_EQ(back.warnings, e.warnings);
}

TEST(CalibrationJson, RoundTrip) {
  const auto cal = calibrate_ks({{800.0, 512.0}, {1300.0, 832.0}});
  const auto back = calibration_from_json(to_json(cal));
  EXPECT_EQ(back.ks, cal.ks);
  EXPECT_EQ(back.fit_r2, cal.fit_r2);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].estimated_Pg_hat, 832.0);
}

TEST(CalibrationJson, Errors) {
  try {
    calibration_from_json("{\n  \"ks\": 0.64,\n  oops\n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(calibration_from_json(R"({"records": []})"), ValidationError);
  EXPECT_THROW(calibration_from_json(R"({"ks": -1, "records": []})"), ValidationError);
  EXPECT_THROW(calibration_from_json(R"({"ks": "high", "records": []})"), ValidationError);
  EXPECT_THROW(read_calibration("/nonexistent/cal.json"), IoError);
}

TEST(ScenarioJson, ParsesAllSections) {
  const auto sc = scenario_from_json(R"({
    "material": {"E": 2.34e6, "nu": 0.4, "h": 8.6e-4, "density": 1100, "Pg0": 1300, "gas_model": "isothermal"},
    "gravity": [0, 0, -9.81],
    "planes": [{"point": [0, 0, 0], "normal": [0, 0, 1]}],
    "restitution": 0.75, "damping": 1.5, "dt": 1e-4, "duration": 0.6,
    "drop_height": 0.5, "initial_velocity": [0, 0, -1], "pin_below": -0.1,
    "indenter": {"vertex": 0, "axis": [0, 0, -1], "speed": 0.005},
    "indentation": {"target_depth": 0.025, "region_radius": 0.13, "depth_step": 0.0025},
    "output_every": 10, "frames_every": 100
  })");
  EXPECT_EQ(sc.material.gas_model, GasModel::Isothermal);
  EXPECT_EQ(sc.config.planes.size(), 1u);
  EXPECT_EQ(sc.config.restitution, 0.75);
  EXPECT_EQ(sc.config.damping, 1.5);
  EXPECT_EQ(*sc.drop_height, 0.5);
  EXPECT_EQ(sc.initial_velocity, Vec3(0, 0, -1));
  EXPECT_EQ(sc.config.indenter->vertex, 0);
  EXPECT_EQ(sc.indentation->options.depth_step, 0.0025);
  EXPECT_EQ(sc.output_every, 10);
  EXPECT_EQ(sc.frames_every, 100);
}

TEST(ScenarioJson, RoundTrip) {
  const std::string text = R"({"material": {"E": 1e6, "h": 1e-3, "density": 1000, "Pg0": 1000},
                               "planes": [{"point": [0, 0, 0], "normal": [0, 0, 1]}], "duration": 0.2})";
  const auto sc = scenario_from_json(text);
  const auto again = scenario_from_json(to_json(sc));
  EXPECT_EQ(again.material.E, sc.material.E);
  EXPECT_EQ(again.material.gas_model, GasModel::ConstantPressure);
  EXPECT_EQ(again.config.duration, 0.2);
  EXPECT_EQ(again.config.planes.size(), 1u);
  EXPECT_EQ(again.config.gravity, sc.config.gravity);
}

TEST(ScenarioJson, Errors) {
  try {
    scenario_from_json("{\n\"material\": {\n\"E\": 1e6,,\n}}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(scenario_from_json(R"({"dt": 1e-4})"), ValidationError);
  EXPECT_THROW(scenario_from_json(R"({"material": {"E": 1e6, "h": 1e-3, "density": 1000, "Pg0": 1000},
                                      "dt": -1})"),
               ValidationError);
  EXPECT_THROW(scenario_from_json(R"({"material": {"E": 1e6, "h": 1e-3, "density": 1000, "Pg0": 1000,
                                      "gas_model": "adiabatic"}})"),
               ValidationError);
  EXPECT_THROW(scenario_from_json(R"({"material": {"E": 1e6, "h": 1e-3, "density": 1000, "Pg0": 1000},
                                      "gravity": [0, 0]})"),
               ValidationError);
}

TEST(PlaceMesh, DropHeightAndPins) {
  auto sc = scenario_from_json(R"({"material": {"E": 1e6, "h": 1e-3, "density": 1000, "Pg0": 1000},
                                   "planes": [{"point": [0, 0, 0], "normal": [0, 0, 1]}],
                                   "drop_height": 0.5, "pin_below": 0.52})");
  const auto placed = place_mesh(make_icosphere(2, 0.1), sc);
  double lowest = 1e9;
  for (const auto& v : placed.vertices) lowest = std::min(lowest, v.z());
  EXPECT_NEAR(lowest, 0.5, 1e-12);
  EXPECT_FALSE(sc.config.pinned.empty());
  for (int i : sc.config.pinned) EXPECT_LT(placed.vertices[static_cast<std::size_t>(i)].z(), 0.52);
}

TEST(TrackedCsv, HeaderAndNanWhileAirborne) {
  const auto s = init_sim(make_icosphere(2, 0.1, Vec3(0, 0, 1)), {1e6, 0.4, 1e-3, 1000, 1000});
  std::ostringstream out;
  write_tracked_header(out);
  write_tracked_row(out, track(s, Plane{}));
  write_tracked_row(out, track(s, std::nullopt));
  std::istringstream in(out.str());
  std::string header;
  std::string airborne;
  std::string no_ground;
  std::getline(in, header);
  std::getline(in, airborne);
  std::getline(in, no_ground);
  EXPECT_EQ(header, "time,cx,cy,cz,H,Du,Dl,d,volume,Pg");
  EXPECT_NE(airborne.find("nan"), std::string::npos);
  EXPECT_EQ(std::count(airborne.begin(), airborne.end(), ','), 9);
  EXPECT_EQ(std::count(no_ground.begin(), no_ground.end(), ','), 9);
}
