#include "shellprobe/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "shellprobe/error.hpp"
#include "shellprobe/shell_solver.hpp"

namespace shellprobe {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(name) + " must be positive and finite");
  }
}

void require_same_size(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("x and y must have the same length");
  if (x.size() < 2) throw InsufficientDataError("a line fit needs at least two points");
}

bool all_equal(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  return *hi - *lo <= 1e-12 * scale;
}

double centered_r2(const std::vector<double>& y, double ss_res) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mean) * (v - mean);
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_size(x, y);
  if (all_equal(x)) throw RankDeficientError("all regressor values are identical");
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.slope * x[i];
    ss_res += r * r;
  }
  fit.r2 = centered_r2(y, ss_res);
  return fit;
}

LineFit fit_with_intercept(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_size(x, y);
  if (all_equal(x)) throw RankDeficientError("all regressor values are identical");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.slope * x[i] - fit.intercept;
    ss_res += r * r;
  }
  fit.r2 = centered_r2(y, ss_res);
  return fit;
}

PhatFit regress_phat(const IndentationSeries& series, const RegressionOptions& options) {
  std::vector<double> w;
  std::vector<double> F;
  if (options.average_levels) {
    std::vector<IndentationSample> sorted(series.samples().begin(), series.samples().end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.force < b.force; });
    std::size_t i = 0;
    while (i < sorted.size()) {
      const double level = sorted[i].force;
      double force_sum = 0.0;
      double depth_sum = 0.0;
      std::size_t count = 0;
      while (i < sorted.size() && sorted[i].force - level <= options.level_tolerance * std::abs(level)) {
        force_sum += sorted[i].force;
        depth_sum += sorted[i].depth;
        ++count;
        ++i;
      }
      F.push_back(force_sum / static_cast<double>(count));
      w.push_back(depth_sum / static_cast<double>(count));
    }
  } else {
    for (const auto& s : series.samples()) {
      F.push_back(s.force);
      w.push_back(s.depth);
    }
  }
  if (w.size() < 2) {
    throw InsufficientDataError("regression needs at least two distinct force levels");
  }
  const LineFit origin = fit_through_origin(w, F);
  PhatFit out;
  out.slope = origin.slope;
  out.r2 = origin.r2;
  out.Pg_hat = origin.slope / (std::numbers::pi * series.region_radius());
  out.with_intercept = fit_with_intercept(w, F);
  out.points = w.size();
  return out;
}

Calibration calibrate_ks(const std::vector<CalibrationRecord>& records) {
  std::vector<double> p;
  std::vector<double> phat;
  for (const auto& r : records) {
    require_positive(r.measured_Pg, "measured Pg");
    require_positive(r.estimated_Pg_hat, "estimated Pg_hat");
    p.push_back(r.measured_Pg);
    phat.push_back(r.estimated_Pg_hat);
  }
  std::vector<double> distinct = p;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw InsufficientDataError("calibration needs records at two or more distinct pressures");
  }
  const LineFit fit = fit_through_origin(p, phat);
  if (!(fit.slope > 0.0)) throw NumericalError("calibration produced a non-positive ks");
  Calibration cal;
  cal.ks = fit.slope;
  cal.records = records;
  cal.fit_r2 = fit.r2;
  return cal;
}

double estimate_pressure(const IndentationSeries& series, const Calibration& cal, const RegressionOptions& options) {
  require_positive(cal.ks, "ks");
  return regress_phat(series, options).Pg_hat / cal.ks;
}

double modulus_for_wrinkle_number(double R, double h, double n, double Pg, double nu) {
  require_positive(R, "R");
  require_positive(h, "h");
  require_positive(Pg, "Pg");
  if (!(n >= 1.0) || !std::isfinite(n)) throw ValidationError("wrinkle count must be at least 1");
  if (!(nu > 0.0 && nu < 0.5)) throw ValidationError("nu must lie in (0, 0.5)");
  const double ratio = kWrinkleScaling * R / (n * h);
  return std::sqrt(12.0 * (1.0 - nu * nu)) * ratio * ratio * Pg;
}

double estimate_modulus_from_wrinkles(double R, double h, int n, double Pg, double nu) {
  if (n < 1) throw ValidationError("wrinkle count must be at least 1");
  return modulus_for_wrinkle_number(R, h, static_cast<double>(n), Pg, nu);
}

double wrinkle_number_for_modulus(double R, double h, double E, double Pg, double nu) {
  ShellParams p{R, h, E, nu, Pg};
  p.validate();
  return kWrinkleScaling * std::sqrt(p.tau());
}

FlaggedValue estimate_modulus_from_critical_depth(double R, double h, double wc, double Pg) {
  require_positive(R, "R");
  require_positive(h, "h");
  require_positive(Pg, "Pg");
  require_positive(wc, "critical depth wc");
  FlaggedValue out;
  out.value = kCriticalDepthMagnitude * Pg * R * R / (h * wc);
  if (!std::isfinite(out.value)) throw ValidationError("critical depth too small");
  out.unreliable = true;
  out.note = "UNRELIABLE: measurement error in the critical depth leaks directly into E";
  return out;
}

double critical_depth_for_modulus(double R, double h, double E, double Pg) {
  require_positive(R, "R");
  require_positive(h, "h");
  require_positive(E, "E");
  require_positive(Pg, "Pg");
  return kCriticalDepthMagnitude * Pg * R * R / (h * E);
}

Estimate run_procedure3(const IndentationSeries& series, const Calibration& cal, int n, double nu,
                        const RegressionOptions& options) {
  require_positive(cal.ks, "ks");
  const PhatFit fit = regress_phat(series, options);
  Estimate est;
  est.object_id = series.object_id();
  est.nu = nu;
  est.ks_used = cal.ks;
  est.Pg = fit.Pg_hat / cal.ks;
  est.E = estimate_modulus_from_wrinkles(series.region_radius(), series.region_thickness(), n, est.Pg, nu);
  est.diagnostics.slope = fit.slope;
  est.diagnostics.slope_r2 = fit.r2;
  est.diagnostics.Pg_hat = fit.Pg_hat;
  est.diagnostics.intercept = fit.with_intercept.intercept;
  est.diagnostics.n_wrinkles = n;
  est.diagnostics.tau = ShellParams{series.region_radius(), series.region_thickness(), est.E, nu, est.Pg}.tau();

  est.warnings = series.warnings();
  if (fit.r2 < kMinSlopeR2) {
    std::ostringstream msg;
    msg << "force/depth fit r2 = " << fit.r2 << " is below " << kMinSlopeR2;
    est.warnings.push_back(msg.str());
  }
  if (est.diagnostics.tau < 10.0) {
    std::ostringstream msg;
    msg << "tau = " << est.diagnostics.tau
        << " is below 10; bending is not negligible and the wrinkle law is approximate";
    est.warnings.push_back(msg.str());
  }
  return est;
}

IndentationSeries synthesize_series(const SyntheticSeriesSpec& spec) {
  require_positive(spec.Pg, "Pg");
  require_positive(spec.ks, "ks");
  if (!(spec.relative_noise >= 0.0)) throw ValidationError("noise level must be non-negative");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<IndentationSample> samples;
  samples.reserve(spec.depths.size());
  const double stiffness = std::numbers::pi * spec.ks * spec.R * spec.Pg;
  for (double w : spec.depths) {
    const double factor = spec.relative_noise > 0.0 ? 1.0 + spec.relative_noise * normal(rng) : 1.0;
    samples.push_back({stiffness * w * factor, w});
  }
  return IndentationSeries(std::move(samples), spec.object_id, spec.R, spec.h);
}

}  // namespace shellprobe
