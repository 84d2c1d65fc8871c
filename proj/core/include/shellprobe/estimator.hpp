#pragma once

// Inverse model: gauge pressure from the force/depth slope of a point
// indentation, F = pi ks R Pg w(0), and elastic modulus from the number of
// radial wrinkles, E = sqrt(12 (1 - nu^2)) (1.33 R / (n h))^2 Pg.

#include <cstdint>
#include <string>
#include <vector>

#include "shellprobe/measurement.hpp"

namespace shellprobe {

inline constexpr double kDefaultPoissonRatio = 0.4;
/// Slope fits below this r2 are reported as unreliable.
inline constexpr double kMinSlopeR2 = 0.9;

/// y = slope * x + intercept, least squares.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares through the origin: slope = sum(x y) / sum(x^2).
/// r2 = 1 - SS_res / SS_tot with SS_tot about the mean of y, so a
/// proportional model that explains less than a constant scores below zero.
/// Throws RankDeficientError if all x are equal.
LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);
/// Ordinary least squares with intercept. Throws RankDeficientError if all x are equal.
LineFit fit_with_intercept(const std::vector<double>& x, const std::vector<double>& y);

struct RegressionOptions {
  /// Average depths of samples sharing a force level before fitting.
  bool average_levels = false;
  /// Relative tolerance for two forces to count as the same level.
  double level_tolerance = 1e-9;
};

struct PhatFit {
  double Pg_hat = 0.0;  // Pa, slope / (pi R)
  double slope = 0.0;   // N/m, through-origin F against w(0)
  double r2 = 0.0;
  LineFit with_intercept;  // diagnostic; a large intercept hints at sensor bias
  std::size_t points = 0;  // samples or force levels used
};

PhatFit regress_phat(const IndentationSeries& series, const RegressionOptions& options = {});

struct CalibrationRecord {
  double measured_Pg = 0.0;       // Pa, manometer
  double estimated_Pg_hat = 0.0;  // Pa, regression slope / (pi R)
};

struct Calibration {
  double ks = 0.0;
  std::vector<CalibrationRecord> records;
  double fit_r2 = 0.0;
};

/// Through-origin fit of Pg_hat against Pg. Needs at least two distinct pressures.
Calibration calibrate_ks(const std::vector<CalibrationRecord>& records);

/// Pg = Pg_hat / ks.
double estimate_pressure(const IndentationSeries& series, const Calibration& cal,
                         const RegressionOptions& options = {});

/// Modulus from an observed wrinkle count n >= 1.
double estimate_modulus_from_wrinkles(double R, double h, int n, double Pg, double nu = kDefaultPoissonRatio);
/// Same relation for a real-valued n >= 1 (scaling-law studies and cross-checks).
double modulus_for_wrinkle_number(double R, double h, double n, double Pg, double nu = kDefaultPoissonRatio);
/// Real-valued wrinkle number 1.33 tau^(1/2) implied by (E, Pg, R, h, nu).
double wrinkle_number_for_modulus(double R, double h, double E, double Pg, double nu = kDefaultPoissonRatio);

/// Modulus from the physical critical depth wc at which wrinkles appear:
/// E = 2.52 Pg R^2 / (h wc). Always flagged unreliable: a small error in wc
/// leaks directly into E, so this is for cross-checks only.
struct FlaggedValue {
  double value = 0.0;
  bool unreliable = true;
  std::string note;
};
FlaggedValue estimate_modulus_from_critical_depth(double R, double h, double wc, double Pg);
/// Physical critical depth implied by (E, Pg, R, h): 2.52 Pg R^2 / (h E).
double critical_depth_for_modulus(double R, double h, double E, double Pg);

struct EstimateDiagnostics {
  double slope = 0.0;  // N/m
  double slope_r2 = 0.0;
  double Pg_hat = 0.0;     // Pa
  double intercept = 0.0;  // N, with-intercept diagnostic fit
  int n_wrinkles = 0;
  double tau = 0.0;
};

struct Estimate {
  std::string object_id;
  double Pg = 0.0;  // Pa
  double E = 0.0;   // Pa
  double nu = kDefaultPoissonRatio;
  double ks_used = 0.0;
  EstimateDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Pressure from the series, then modulus from the wrinkle count.
Estimate run_procedure3(const IndentationSeries& series, const Calibration& cal, int n,
                        double nu = kDefaultPoissonRatio, const RegressionOptions& options = {});

/// Noise model for synthetic series: F = pi ks R Pg w (1 + noise * N(0, 1)).
struct SyntheticSeriesSpec {
  double Pg = 0.0;
  double ks = 0.0;
  double R = 0.0;
  double h = 0.0;
  std::vector<double> depths;  // m
  double relative_noise = 0.0;
  std::uint64_t seed = 0;
  std::string object_id = "synthetic";
};

IndentationSeries synthesize_series(const SyntheticSeriesSpec& spec);

}  // namespace shellprobe
