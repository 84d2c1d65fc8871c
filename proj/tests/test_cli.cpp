#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "json.hpp"
#include "shellprobe/estimator.hpp"
#include "shellprobe/geometry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shellprobe;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shellprobe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string series(const std::string& name, double Pg, double ks = 0.64, double R = 0.13) const {
    SyntheticSeriesSpec spec{Pg, ks, R, 8.6e-4, {0.005, 0.010, 0.015, 0.020}, 0.0, 1};
    write_series(fs::path(path(name)), synthesize_series(spec));
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CalibrateNoiseless) {
  const auto r =
      run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--series", series("b.csv", 1300),
           "--pressure", "1300", "--radius", "0.13", "--thickness", "8.6e-4", "--out", path("cal.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(path("cal.json"))["ks"].get<double>(), 0.64, 1e-12);
  EXPECT_NE(r.out.find("ks = 0.64"), std::string::npos);
}

TEST_F(CliTest, CalibrateSinglePair) {
  const auto r = run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--radius", "0.13",
                      "--thickness", "8.6e-4"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("two"), std::string::npos);
}

TEST_F(CliTest, CalibrateWarnsOnMillimeters) {
  {
    std::ofstream f(path("mm.csv"));
    f << "force_N,depth_m\n5,5\n10,10\n15,15\n";
  }
  const auto r = run({"calibrate", "--series", path("mm.csv"), "--pressure", "800", "--series", series("b.csv", 1300),
                      "--pressure", "1300", "--radius", "0.13", "--thickness", "8.6e-4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("units"), std::string::npos);
}

TEST_F(CliTest, EstimateNoiselessExact) {
  run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--series", series("b.csv", 2000),
       "--pressure", "2000", "--radius", "0.13", "--thickness", "8.6e-4", "--out", path("cal.json")});
  const auto r = run({"estimate", "--series", series("obj.csv", 1300), "--calibration", path("cal.json"), "--radius",
                      "0.13", "--thickness", "8.6e-4", "--wrinkles", "8", "--out", path("est.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(path("est.json"));
  EXPECT_NEAR(j["Pg_pa"].get<double>(), 1300.0, 1e-9);
  EXPECT_NEAR(j["E_pa"].get<double>(), estimate_modulus_from_wrinkles(0.13, 8.6e-4, 8, 1300.0), 1e-3);
  EXPECT_EQ(j["nu"].get<double>(), 0.4);
  EXPECT_EQ(j["object_id"], "obj");
}

TEST_F(CliTest, EstimateMeshRadiusAgreesWithExplicit) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(4, 0.13));
  run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--series", series("b.csv", 2000),
       "--pressure", "2000", "--radius", "0.13", "--thickness", "8.6e-4", "--out", path("cal.json")});
  const std::string s = series("obj.csv", 1300);
  const auto a = run({"estimate", "--series", s, "--calibration", path("cal.json"), "--radius", "0.13", "--thickness",
                      "8.6e-4", "--wrinkles", "8", "--out", path("explicit.json")});
  const auto b = run({"estimate", "--series", s, "--calibration", path("cal.json"), "--mesh", path("ball.obj"),
                      "--seed-vertex", "0", "--thickness", "8.6e-4", "--wrinkles", "8", "--out", path("mesh.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = read_json(path("explicit.json"));
  const auto jb = read_json(path("mesh.json"));
  for (const char* key : {"Pg_pa", "E_pa"}) {
    EXPECT_NEAR(jb[key].get<double>(), ja[key].get<double>(), 0.02 * ja[key].get<double>()) << key;
  }
}

TEST_F(CliTest, EstimateWithoutWrinkles) {
  const auto r = run({"estimate", "--series", series("obj.csv", 1300), "--calibration", path("cal.json"), "--radius",
                      "0.13", "--thickness", "8.6e-4"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("wrinkles"), std::string::npos);
}

TEST_F(CliTest, EstimateMissingCalibrationIsIo) {
  const auto r = run({"estimate", "--series", series("obj.csv", 1300), "--calibration", path("none.json"), "--radius",
                      "0.13", "--thickness", "8.6e-4", "--wrinkles", "8"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, EstimateRankDeficientIsNumerical) {
  {
    std::ofstream f(path("flat.csv"));
    f << "force_N,depth_m\n5,0.01\n6,0.01\n7,0.01\n";
  }
  run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--series", series("b.csv", 2000),
       "--pressure", "2000", "--radius", "0.13", "--thickness", "8.6e-4", "--out", path("cal.json")});
  const auto r = run({"estimate", "--series", path("flat.csv"), "--calibration", path("cal.json"), "--radius", "0.13",
                      "--thickness", "8.6e-4", "--wrinkles", "8"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, SolveShellCritical) {
  const auto r = run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--tau", "40",
                      "--critical", "--out", path("solve")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(path("solve/diagnostics.json"));
  EXPECT_NEAR(j["critical_W0"].get<double>(), -2.52, 0.08);
  EXPECT_NEAR(j["tau"].get<double>(), 40.0, 1e-9);
  EXPECT_EQ(j["n_predicted"], 8);
}

TEST_F(CliTest, SolveShellZeroDepthProfile) {
  const auto r = run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--modulus",
                      "2.34e6", "--W0", "0", "--out", path("solve")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("solve/profile.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,W,Psi,hoop_stress,radial_stress");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    EXPECT_EQ(std::stod(line.substr(a + 1, b - a - 1)), 0.0);
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(CliTest, SolveShellAnnulus) {
  const auto r = run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--tau", "100",
                      "--W0", "-4", "--membrane", "--out", path("solve")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sol = read_json(path("solve/diagnostics.json"))["solutions"][0];
  ASSERT_TRUE(sol["annulus"].is_object());
  EXPECT_NEAR(sol["annulus"]["rho_min"].get<double>(), 0.466, 5e-3);
  EXPECT_NEAR(sol["annulus"]["rho_max"].get<double>(), 1.238, 5e-3);
}

TEST_F(CliTest, SolveShellFullModel) {
  const auto r = run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--tau", "100",
                      "--W0", "-1", "--full", "--out", path("solve")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(read_json(path("solve/diagnostics.json"))["membrane_limit"].get<bool>());
}

TEST_F(CliTest, SolveShellValidation) {
  EXPECT_EQ(run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--W0", "-1",
                 "--out", path("s")})
                .code,
            2);
  EXPECT_EQ(run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--tau", "40",
                 "--W0", "1", "--out", path("s")})
                .code,
            2);
}

TEST_F(CliTest, SolveShellNonconvergenceIsNumerical) {
  const auto r = run({"solve-shell", "--radius", "0.13", "--thickness", "8.6e-4", "--pressure", "1300", "--tau", "100",
                      "--W0", "-5000", "--grid", "200", "--out", path("solve")});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, SimulateDropRebound) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(3, 0.13));
  {
    std::ofstream f(path("drop.json"));
    f << R"({"material": {"E": 2.34e6, "nu": 0.4, "h": 8.6e-4, "density": 1100, "Pg0": 1300},
             "planes": [{"point": [0, 0, 0], "normal": [0, 0, 1]}],
             "restitution": 0.75, "dt": 1e-4, "duration": 0.7, "drop_height": 0.5, "output_every": 10})";
  }
  const auto r = run({"simulate", "--scenario", path("drop.json"), "--mesh", path("ball.obj"), "--out", path("sim")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(path("sim/summary.json"))["rebound_apex"].get<double>(), 0.28, 0.05 * 0.28);
  const std::string csv = slurp(path("sim/tracked.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,cx,cy,cz,H,Du,Dl,d,volume,Pg");
}

TEST_F(CliTest, SimulateIndentationFeedsEstimate) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(3, 0.13));
  {
    std::ofstream f(path("indent.json"));
    f << R"({"material": {"E": 2.34e6, "nu": 0.4, "h": 8.6e-4, "density": 1100, "Pg0": 1300},
             "gravity": [0, 0, 0], "pin_below": -0.078,
             "indenter": {"vertex": 0, "axis": [0, 0, -1], "speed": 0.005},
             "indentation": {"target_depth": 0.015, "region_radius": 0.13, "depth_step": 0.005}})";
  }
  const auto r = run({"simulate", "--scenario", path("indent.json"), "--mesh", path("ball.obj"), "--out", path("sim")});
  ASSERT_EQ(r.code, 0) << r.err;
  run({"calibrate", "--series", series("a.csv", 800), "--pressure", "800", "--series", series("b.csv", 2000),
       "--pressure", "2000", "--radius", "0.13", "--thickness", "8.6e-4", "--out", path("cal.json")});
  const auto e = run({"estimate", "--series", path("sim/series.csv"), "--calibration", path("cal.json"), "--radius",
                      "0.13", "--thickness", "8.6e-4", "--wrinkles", "8"});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(json::parse(e.out).contains("Pg_pa"));
}

TEST_F(CliTest, SimulateBadJson) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(2, 0.13));
  {
    std::ofstream f(path("bad.json"));
    f << "{\n  \"material\": {\n    \"E\": ,\n  }\n}\n";
  }
  const auto r = run({"simulate", "--scenario", path("bad.json"), "--mesh", path("ball.obj"), "--out", path("sim")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateInstabilityReportsFrame) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(3, 0.13));
  {
    std::ofstream f(path("stiff.json"));
    f << R"({"material": {"E": 2.34e9, "nu": 0.4, "h": 8.6e-4, "density": 1100, "Pg0": 1300},
             "dt": 5e-3, "duration": 1.0})";
  }
  const auto r = run({"simulate", "--scenario", path("stiff.json"), "--mesh", path("ball.obj"), "--out", path("sim")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("frame"), std::string::npos);
}

TEST_F(CliTest, MeshInfo) {
  write_obj(fs::path(path("ball.obj")), make_icosphere(4, 1.0));
  const auto r = run({"mesh-info", "--mesh", path("ball.obj"), "--seed-vertex", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["watertight"].get<bool>());
  EXPECT_NEAR(j["volume_m3"].get<double>(), 4.18879, 0.01 * 4.18879);
  EXPECT_NEAR(j["curvature"]["radius_m"].get<double>(), 1.0, 0.02);
}

TEST_F(CliTest, MeshInfoMissingFile) { EXPECT_EQ(run({"mesh-info", "--mesh", path("none.obj")}).code, 1); }

TEST_F(CliTest, UnknownFlagIsValidation) {
  EXPECT_EQ(run({"mesh-info", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, SeededCommandsIdempotent) {
  const std::vector<std::string> args{"--seed",   "17",      "synth-series", "--pressure", "1300",    "--ks", "0.64",
                                      "--radius", "0.13",    "--thickness",  "8.6e-4",     "--depth", "0.01", "--depth",
                                      "0.02",     "--depth", "0.03",         "--noise",    "0.05"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto other = args;
  other[1] = "18";
  EXPECT_NE(run(other).out, a.out);
}

TEST_F(CliTest, MakeSphere) {
  ASSERT_EQ(run({"make-sphere", "--radius", "0.2", "--subdivisions", "2", "--out", path("s.obj")}).code, 0);
  const auto m = load_mesh(path("s.obj"));
  EXPECT_EQ(m.num_faces(), 320u);
}
