#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "shellprobe/error.hpp"
#include "shellprobe/shell_solver.hpp"

using namespace shellprobe;

namespace {

// 13 cm rubber ball, tau = 100 by default.
ShellParams params(double tau = 100.0) { return ShellParams::with_tau(tau, 0.13, 8.6e-4, 0.4, 1300.0); }

// tests/oracles/shooting_oracle.py -4 10
constexpr double kOracleForce = 6.408346;
constexpr double kOracleMinHoop = -0.165679;
constexpr double kOracleAnnulusMin = 0.465980;
constexpr double kOracleAnnulusMax = 1.238085;

}  // namespace

TEST(ShellParams, DerivedQuantities) {
  const ShellParams p{0.13, 8.6e-4, 2.34e6, 0.4, 1300.0};
  const double B = 2.34e6 * std::pow(8.6e-4, 3) / (12.0 * 0.84);
  EXPECT_DOUBLE_EQ(p.bending_stiffness(), B);
  EXPECT_DOUBLE_EQ(p.capillary_length(), std::sqrt(1300.0 * std::pow(0.13, 3) / (2.34e6 * 8.6e-4)));
  EXPECT_NEAR(p.tau(), 1300.0 * 0.0169 / std::sqrt(2.34e6 * 8.6e-4 * B), 1e-12 * p.tau());
  EXPECT_NEAR(p.tau(), 40.3, 0.1);
}

TEST(ShellParams, Validation) {
  EXPECT_THROW((ShellParams{0.0, 1e-3, 1e6, 0.4, 1000}).validate(), ValidationError);
  EXPECT_THROW((ShellParams{0.1, 1e-3, 1e6, 0.5, 1000}).validate(), ValidationError);
  EXPECT_THROW((ShellParams{0.1, 1e-3, 1e6, 0.0, 1000}).validate(), ValidationError);
  EXPECT_THROW((ShellParams{0.1, 1e-3, -1e6, 0.4, 1000}).validate(), ValidationError);
  EXPECT_NO_THROW((ShellParams{0.1, 1e-3, 1e6, 0.4, 1000}).validate());
}

TEST(ShellParams, WithTau) { EXPECT_NEAR(params(40.0).tau(), 40.0, 1e-10); }

TEST(ShellParams, DepthAndForceConversions) {
  const auto p = params();
  const double lp = p.capillary_length();
  EXPECT_NEAR(p.to_dimensionless_depth(0.01), -0.01 * p.R / (lp * lp), 1e-15);
  EXPECT_NEAR(p.to_physical_depth(p.to_dimensionless_depth(0.02)), 0.02, 1e-15);
  EXPECT_NEAR(p.to_physical_force(2.0), 2.0 * p.Pg * lp * lp, 1e-12);
}

TEST(SolverOptions, Validation) {
  SolverOptions o;
  o.grid_size = 100;
  EXPECT_THROW(o.validate(), ValidationError);
  o = {};
  o.rho_inf = 10;
  EXPECT_THROW(o.validate(), ValidationError);
  o = {};
  o.max_continuation_step = 0.5;
  EXPECT_THROW(o.validate(), ValidationError);
  EXPECT_THROW(solve_indentation(params(), 0.5), ValidationError);
}

TEST(SolveIndentation, FlatStateAtZeroDepth) {
  const auto s = solve_indentation(params(), 0.0);
  EXPECT_EQ(s.force, 0.0);
  EXPECT_FALSE(s.annulus);
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    EXPECT_LT(std::abs(s.W[i]), 1e-12);
    EXPECT_NEAR(s.Psi[i], s.rho[i] / 2.0, 1e-12);
  }
}

TEST(SolveIndentation, GridInvariants) {
  const auto s = solve_indentation(params(), -2.0);
  EXPECT_TRUE(std::is_sorted(s.rho.begin(), s.rho.end()));
  EXPECT_EQ(std::adjacent_find(s.rho.begin(), s.rho.end()), s.rho.end());
  EXPECT_GT(s.inner_radius(), 0.0);
  EXPECT_DOUBLE_EQ(s.outer_radius(), SolverOptions{}.rho_inf);
  EXPECT_EQ(s.rho.size(), static_cast<std::size_t>(SolverOptions{}.grid_size));
  EXPECT_DOUBLE_EQ(s.W.front(), -2.0);
  EXPECT_LT(s.max_residual, 1e-8);
  EXPECT_GT(s.force, 0.0);
}

TEST(SolveIndentation, ShallowHasNoCompression) {
  const auto s = solve_indentation(params(), -1.0);
  EXPECT_FALSE(s.annulus);
  EXPECT_GE(s.min_hoop_stress(), 0.0);
}

TEST(SolveIndentation, AnnulusMatchesShootingOracle) {
  const auto s = solve_indentation(params(), -4.0);
  ASSERT_TRUE(s.annulus);
  EXPECT_GT(s.annulus->rho_min, s.inner_radius());
  EXPECT_NEAR(s.annulus->rho_min, kOracleAnnulusMin, 5e-3);
  EXPECT_NEAR(s.annulus->rho_max, kOracleAnnulusMax, 5e-3);
  EXPECT_NEAR(s.min_hoop_stress(), kOracleMinHoop, 2e-3);
  EXPECT_NEAR(s.force, kOracleForce, 5e-3 * kOracleForce);
}

TEST(SolveIndentation, AnnulusIsWhereHoopStressIsNegative) {
  const auto s = solve_indentation(params(), -4.0);
  ASSERT_TRUE(s.annulus);
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const bool inside = s.rho[i] >= s.annulus->rho_min && s.rho[i] <= s.annulus->rho_max;
    if (s.hoop_stress[i] < 0.0) EXPECT_TRUE(inside) << "rho = " << s.rho[i];
    const bool well_inside = s.rho[i] > s.annulus->rho_min + 0.02 && s.rho[i] < s.annulus->rho_max - 0.02;
    if (well_inside) EXPECT_LT(s.hoop_stress[i], 0.0) << "rho = " << s.rho[i];
  }
}

TEST(SolveIndentation, StressFieldsConsistent) {
  const auto s = solve_indentation(params(), -3.0);
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    EXPECT_NEAR(s.radial_stress[i], s.Psi[i] / s.rho[i], 1e-12 * std::max(1.0, std::abs(s.radial_stress[i])));
  }
}

TEST(SolveIndentation, FarFieldConditions) {
  for (double W0 : {-1.0, -2.5, -4.0, -6.0}) {
    const auto s = solve_indentation(params(), W0);
    EXPECT_LT(s.far_field_displacement(), 1e-4) << W0;
    EXPECT_LT(s.far_field_stress_offset(), 1e-3 * s.outer_radius()) << W0;
  }
}

TEST(SolveIndentation, FarFieldAsymptoteDeep) {
  const auto s = solve_indentation(params(), -6.0);
  EXPECT_LT(s.far_field_displacement(), 1e-4);
  EXPECT_LT(s.far_field_asymptote_error(), 1e-6);
}

TEST(SolveIndentation, DomainConvergence) {
  SolverOptions wide;
  wide.rho_inf = 2.0 * SolverOptions{}.rho_inf;
  wide.grid_size = 2 * SolverOptions{}.grid_size;
  const double f = solve_indentation(params(), -3.0).force;
  const double f_wide = solve_indentation(params(), -3.0, wide).force;
  EXPECT_LT(std::abs(f_wide - f) / f_wide, 0.005);
}

TEST(SolveIndentation, FullModelClampedSlope) {
  SolverOptions full;
  full.membrane_limit = false;
  const auto s = solve_indentation(params(), -2.0, full);
  EXPECT_FALSE(s.membrane_limit);
  EXPECT_NEAR(s.slope.front(), 0.0, 1e-10);
  EXPECT_NEAR(s.slope.back(), 0.0, 1e-10);
}

TEST(SolveIndentation, SlopeMatchesProfile) {
  SolverOptions full;
  full.membrane_limit = false;
  for (const auto& s : {solve_indentation(params(), -3.0), solve_indentation(params(), -3.0, full)}) {
    for (std::size_t i = 1; i < s.rho.size(); ++i) {
      if (s.rho[i - 1] < 0.1) continue;
      const double fd = (s.W[i] - s.W[i - 1]) / (s.rho[i] - s.rho[i - 1]);
      const double mid = 0.5 * (s.slope[i] + s.slope[i - 1]);
      EXPECT_NEAR(fd, mid, 1e-8) << "rho = " << s.rho[i];
    }
  }
}

TEST(SolveSweep, MatchesIndividualSolves) {
  const std::vector<double> depths{-0.5, -1.5, -3.0};
  const auto sweep = solve_sweep(params(), depths);
  ASSERT_EQ(sweep.size(), 3u);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const auto single = solve_indentation(params(), depths[i]);
    EXPECT_DOUBLE_EQ(sweep[i].W0, depths[i]);
    EXPECT_NEAR(sweep[i].force, single.force, 1e-6 * single.force);
  }
}

TEST(CriticalDepth, NearUniversalValue) {
  const auto c = critical_depth(params(40.0));
  EXPECT_NEAR(c.W0, -2.52, 0.08);
  EXPECT_LE(c.bisection_iterations, 20);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(CriticalDepth, IndependentOfDimensionalParameters) {
  const double base = critical_depth(params(100.0)).W0;
  const double other = critical_depth(ShellParams{2.0, 0.01, 5e9, 0.4, 2e5}).W0;
  EXPECT_NEAR(other, base, 2e-3);
}

TEST(CriticalDepth, LowTauWarns) {
  CriticalDepthOptions o;
  o.tolerance = 0.05;
  o.solver.membrane_limit = true;
  const auto c = critical_depth(params(5.0), o);
  EXPECT_FALSE(c.warnings.empty());
}

TEST(WrinkleCount, ScalingLaw) {
  const auto w40 = wrinkle_count_for_tau(40.0);
  EXPECT_NEAR(w40.unrounded, 8.41, 0.01);
  EXPECT_EQ(w40.count, 8);
  const auto w1 = wrinkle_count_for_tau(1.0);
  EXPECT_DOUBLE_EQ(w1.unrounded, 1.33);
  EXPECT_EQ(w1.count, 1);
  EXPECT_EQ(wrinkle_count_for_tau(400.0).count, 27);
  EXPECT_EQ(wrinkle_count(params(400.0)).count, 27);
  EXPECT_THROW(wrinkle_count_for_tau(0.0), ValidationError);
}

TEST(CapProfile, PiecewiseForm) {
  const CapProfile c4(-4.0);
  EXPECT_DOUBLE_EQ(c4(0.0), -4.0);
  EXPECT_DOUBLE_EQ(c4(2.0), 0.0);
  EXPECT_DOUBLE_EQ(c4(3.0), 0.0);
  EXPECT_DOUBLE_EQ(c4.contact_radius(), 2.0);
  EXPECT_DOUBLE_EQ(CapProfile(-9.0)(1.0), -8.0);
  EXPECT_TRUE(c4.warnings().empty());
}

TEST(CapProfile, ContinuousAtJunction) {
  for (double W0 : {-1.0, -2.5, -8.0, -30.0}) {
    const CapProfile c(W0);
    const double r = c.contact_radius();
    EXPECT_NEAR(c(r * (1 - 1e-12)), c(r * (1 + 1e-12)), 1e-9);
  }
}

TEST(CapProfile, ShallowWarnsPositiveRejected) {
  EXPECT_FALSE(CapProfile(-0.5).warnings().empty());
  EXPECT_THROW(CapProfile(0.5), ValidationError);
}

TEST(CapVolumeChange, HandValue) {
  const auto p = params();
  EXPECT_NEAR(cap_volume_change(p, 0.01), 2.042e-5, 1e-8);
  EXPECT_NEAR(cap_volume_change(p, 0.02), 4.0 * cap_volume_change(p, 0.01), 1e-18);
  EXPECT_THROW(cap_volume_change(p, 0.0), ValidationError);
  EXPECT_THROW(cap_volume_change(p, -0.01), ValidationError);
}

TEST(SolutionCsv, HeaderAndRows) {
  const auto s = solve_indentation(params(), 0.0);
  std::ostringstream out;
  write_solution_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,W,Psi,hoop_stress,radial_stress");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, s.rho.size());
}
