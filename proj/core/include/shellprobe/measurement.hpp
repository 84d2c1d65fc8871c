#pragma once

// Indentation and drop-test measurement records, plus the CSV interchange
// format used by sensors and by the virtual indenter.
//
// CSV layout: UTF-8, header `force_N,depth_m`, one sample per line,
// `#` comment lines ignored. Values are SI (newtons, meters); depth is a
// positive magnitude.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace shellprobe {

struct IndentationSample {
  double force = 0.0;  // N
  double depth = 0.0;  // m, positive magnitude of w(0)
};

/// Ordered {force, depth} pairs measured on one convex patch of one object.
/// Immutable after construction.
class IndentationSeries {
 public:
  static constexpr std::size_t kMinSamples = 3;
  /// Above this thickness/radius ratio the shallow-shell assumption is flagged.
  static constexpr double kThinShellWarnRatio = 0.05;

  IndentationSeries(std::vector<IndentationSample> samples, std::string object_id, double region_radius,
                    double region_thickness);

  std::span<const IndentationSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const std::string& object_id() const noexcept { return object_id_; }
  double region_radius() const noexcept { return region_radius_; }
  double region_thickness() const noexcept { return region_thickness_; }

  std::vector<std::string> warnings() const;

 private:
  std::vector<IndentationSample> samples_;
  std::string object_id_;
  double region_radius_;
  double region_thickness_;
};

IndentationSeries parse_series(std::istream& in, std::string object_id, double region_radius, double region_thickness);

/// Reads a series CSV; the object id defaults to the file stem.
IndentationSeries parse_series(const std::filesystem::path& path, double region_radius, double region_thickness);

/// Writes the CSV form. Values are printed with enough digits to round-trip.
void write_series(std::ostream& out, const IndentationSeries& series);
void write_series(const std::filesystem::path& path, const IndentationSeries& series);

/// Free-fall bounce used to measure the coefficient of restitution.
class DropTest {
 public:
  DropTest(double drop_height, double bounce_height);
  double drop_height() const noexcept { return drop_height_; }
  double bounce_height() const noexcept { return bounce_height_; }

 private:
  double drop_height_;
  double bounce_height_;
};

/// sqrt(bounce / drop), in (0, 1].
double restitution_coefficient(const DropTest& test);

}  // namespace shellprobe
