#include "shellprobe/measurement.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "shellprobe/error.hpp"

namespace shellprobe {
namespace {

constexpr std::string_view kHeader = "force_N,depth_m";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

IndentationSeries::IndentationSeries(std::vector<IndentationSample> samples, std::string object_id,
                                     double region_radius, double region_thickness)
    : samples_(std::move(samples)),
      object_id_(std::move(object_id)),
      region_radius_(region_radius),
      region_thickness_(region_thickness) {
  if (samples_.size() < kMinSamples) {
    throw InsufficientDataError("indentation series needs at least " + std::to_string(kMinSamples) + " samples, got " +
                                std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.force > 0.0) || !(s.depth > 0.0) || !std::isfinite(s.force) || !std::isfinite(s.depth)) {
      throw ValidationError("sample " + std::to_string(i) + ": force and depth must be positive and finite");
    }
  }
  if (!(region_radius_ > 0.0) || !std::isfinite(region_radius_)) {
    throw ValidationError("region radius must be positive");
  }
  if (!(region_thickness_ > 0.0) || !std::isfinite(region_thickness_)) {
    throw ValidationError("region thickness must be positive");
  }
  if (region_thickness_ >= region_radius_) {
    throw ValidationError("region thickness must be smaller than the curvature radius");
  }
}

std::vector<std::string> IndentationSeries::warnings() const {
  std::vector<std::string> out;
  const double ratio = region_thickness_ / region_radius_;
  if (ratio > kThinShellWarnRatio) {
    std::ostringstream msg;
    msg << "h/R = " << ratio << " exceeds " << kThinShellWarnRatio
        << "; the thin shallow-shell assumption is questionable";
    out.push_back(msg.str());
  }
  return out;
}

IndentationSeries parse_series(std::istream& in, std::string object_id, double region_radius, double region_thickness) {
  std::vector<IndentationSample> samples;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != kHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
      }
      seen_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected two comma-separated fields");
    }
    IndentationSample s;
    if (!parse_double(line.substr(0, comma), s.force) || !parse_double(line.substr(comma + 1), s.depth)) {
      throw ParseError(line_no, "malformed number in '" + std::string(line) + "'");
    }
    if (!(s.force > 0.0) || !(s.depth > 0.0)) {
      throw ValidationError("line " + std::to_string(line_no) + ": force and depth must be positive");
    }
    samples.push_back(s);
  }
  if (!seen_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return IndentationSeries(std::move(samples), std::move(object_id), region_radius, region_thickness);
}

IndentationSeries parse_series(const std::filesystem::path& path, double region_radius, double region_thickness) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file '" + path.string() + "'");
  return parse_series(in, path.stem().string(), region_radius, region_thickness);
}

void write_series(std::ostream& out, const IndentationSeries& series) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << kHeader << '\n';
  for (const auto& s : series.samples()) out << s.force << ',' << s.depth << '\n';
  out.precision(old_precision);
}

void write_series(const std::filesystem::path& path, const IndentationSeries& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write series file '" + path.string() + "'");
  write_series(out, series);
}

DropTest::DropTest(double drop_height, double bounce_height)
    : drop_height_(drop_height), bounce_height_(bounce_height) {
  if (!(drop_height_ > 0.0) || !(bounce_height_ > 0.0) || bounce_height_ > drop_height_) {
    throw ValidationError("drop test requires 0 < bounce height <= drop height");
  }
}

double restitution_coefficient(const DropTest& test) { return std::sqrt(test.bounce_height() / test.drop_height()); }

}  // namespace shellprobe
