#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "shellprobe/error.hpp"
#include "shellprobe/measurement.hpp"

using namespace shellprobe;

namespace {

IndentationSeries parse_text(const std::string& text, double R = 0.13, double h = 0.001) {
  std::istringstream in(text);
  return parse_series(in, "obj", R, h);
}

}  // namespace

TEST(ParseSeries, ThreeRowsEchoed) {
  const auto s = parse_text("force_N,depth_m\n5,0.010\n7.5,0.015\n10,0.020\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.samples()[0].force, 5.0);
  EXPECT_DOUBLE_EQ(s.samples()[1].depth, 0.015);
  EXPECT_DOUBLE_EQ(s.samples()[2].force, 10.0);
  EXPECT_DOUBLE_EQ(s.region_radius(), 0.13);
  EXPECT_DOUBLE_EQ(s.region_thickness(), 0.001);
  EXPECT_EQ(s.object_id(), "obj");
  EXPECT_TRUE(s.warnings().empty());
}

TEST(ParseSeries, TwoRowsIsInsufficient) {
  EXPECT_THROW(parse_text("force_N,depth_m\n5,0.010\n7.5,0.015\n"), InsufficientDataError);
}

TEST(ParseSeries, MalformedRowNamesLine) {
  try {
    parse_text("force_N,depth_m\nabc,0.01\n5,0.01\n6,0.02\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(ParseSeries, NonpositiveValueRejected) {
  EXPECT_THROW(parse_text("force_N,depth_m\n0,0.01\n5,0.01\n6,0.02\n"), ValidationError);
  EXPECT_THROW(parse_text("force_N,depth_m\n5,-0.01\n5,0.01\n6,0.02\n"), ValidationError);
}

TEST(ParseSeries, CommentsAndBlankLinesIgnored) {
  const auto s = parse_text("# sensor A\nforce_N,depth_m\n5,0.01\n\n# trial 2\n6,0.02\n7,0.03\n");
  EXPECT_EQ(s.size(), 3u);
}

TEST(ParseSeries, WrongHeaderRejected) {
  EXPECT_THROW(parse_text("depth_m,force_N\n0.01,5\n0.02,6\n0.03,7\n"), ParseError);
}

TEST(ParseSeries, MissingFileIsIoError) {
  EXPECT_THROW(parse_series(std::filesystem::path("/nonexistent/series.csv"), 0.1, 0.001), IoError);
}

TEST(ParseSeries, ObjectIdFromFileStem) {
  const auto path = std::filesystem::temp_directory_path() / "shellprobe_ball_a.csv";
  {
    std::ofstream out(path);
    out << "force_N,depth_m\n5,0.01\n6,0.02\n7,0.03\n";
  }
  EXPECT_EQ(parse_series(path, 0.1, 0.001).object_id(), "shellprobe_ball_a");
  std::filesystem::remove(path);
}

TEST(IndentationSeriesInvariants, GeometryValidated) {
  std::vector<IndentationSample> s{{1, 0.01}, {2, 0.02}, {3, 0.03}};
  EXPECT_THROW(IndentationSeries(s, "x", 0.0, 0.001), ValidationError);
  EXPECT_THROW(IndentationSeries(s, "x", 0.1, 0.0), ValidationError);
  EXPECT_THROW(IndentationSeries(s, "x", 0.1, 0.2), ValidationError);
}

TEST(IndentationSeriesInvariants, ThickShellWarns) {
  std::vector<IndentationSample> s{{1, 0.01}, {2, 0.02}, {3, 0.03}};
  const IndentationSeries series(s, "x", 0.1, 0.01);
  EXPECT_FALSE(series.warnings().empty());
}

TEST(WriteSeries, RoundTripsExactly) {
  std::vector<IndentationSample> s{{0.1 + 0.2, 1.0 / 3.0}, {std::sqrt(2.0), 0.02}, {7.0, 0.03}};
  const IndentationSeries series(s, "x", 0.1, 0.001);
  std::ostringstream out;
  write_series(out, series);
  const auto back = parse_text(out.str(), 0.1, 0.001);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.samples()[i].force, s[i].force);
    EXPECT_EQ(back.samples()[i].depth, s[i].depth);
  }
}

TEST(Restitution, PerfectlyElastic) { EXPECT_DOUBLE_EQ(restitution_coefficient({1.0, 1.0}), 1.0); }

TEST(Restitution, ExactSquareRoot) { EXPECT_DOUBLE_EQ(restitution_coefficient({1.0, 0.25}), 0.5); }

TEST(Restitution, HandValue) { EXPECT_NEAR(restitution_coefficient({0.8, 0.45}), 0.75, 1e-12); }

TEST(Restitution, InvalidDropTests) {
  EXPECT_THROW(DropTest(1.0, 1.5), ValidationError);
  EXPECT_THROW(DropTest(1.0, 0.0), ValidationError);
  EXPECT_THROW(DropTest(0.0, 0.0), ValidationError);
}
