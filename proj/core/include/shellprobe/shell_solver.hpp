#pragma once

// Axisymmetric point indentation of a pressurized shallow spherical shell.
//
// Unknowns are the dimensionless vertical displacement W(rho) and the Airy
// stress derivative Psi(rho), with rho = r / l_p, W = w R / l_p^2 and
// Psi = psi / (Pg R l_p). Integrating the vertical equilibrium equation once
// gives
//
//   tau^-2 rho (lap W)' + rho Psi - Psi W' = rho^2 / 2 - f / (2 pi)
//
// where f = F / (Pg l_p^2) is the dimensionless indentation force. The
// compatibility equation integrates to
//
//   rho (Psi' + Psi / rho)' = rho W' - W'^2 / 2.
//
// The problem is solved displacement-controlled: W(rho_0) = W0 at a small
// inner radius and f is an unknown of the Newton system. Far-field
// conditions: W -> 0 and Psi -> rho / 2 (imposed through the exact decaying
// asymptote (rho Psi)' = rho at rho_inf).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shellprobe {

/// n ~ kWrinkleScaling * tau^(1/2).
inline constexpr double kWrinkleScaling = 1.33;
/// Magnitude of the dimensionless depth at which wrinkles first appear.
inline constexpr double kCriticalDepthMagnitude = 2.52;

/// Geometry and material of a local spherical shell patch. SI units.
struct ShellParams {
  double R = 0.0;   // curvature radius, m
  double h = 0.0;   // thickness, m
  double E = 0.0;   // Young's modulus, Pa
  double nu = 0.4;  // Poisson's ratio
  double Pg = 0.0;  // gauge pressure, Pa

  /// Throws ValidationError unless R, h, E, Pg > 0, nu in (0, 0.5) and tau is finite.
  void validate() const;

  /// B = E h^3 / (12 (1 - nu^2)).
  double bending_stiffness() const;
  /// l_p = sqrt(Pg R^3 / (E h)).
  double capillary_length() const;
  /// tau = Pg R^2 / sqrt(E h B).
  double tau() const;

  /// Dimensionless depth W0 (<= 0) for a physical indentation magnitude w (>= 0).
  double to_dimensionless_depth(double w) const;
  /// Physical indentation magnitude for a dimensionless depth W0.
  double to_physical_depth(double W0) const;
  /// Physical force F = f Pg l_p^2.
  double to_physical_force(double f) const;

  /// Parameter set with the requested tau, obtained by adjusting E with R, h, nu, Pg fixed.
  static ShellParams with_tau(double tau, double R, double h, double nu, double Pg);
};

struct SolverOptions {
  bool membrane_limit = true;
  int grid_size = 1000;
  double rho_inf = 60.0;
  /// rho_0 = inner_radius_ratio * rho_inf.
  double inner_radius_ratio = 1e-6;
  double max_continuation_step = 0.25;
  double min_continuation_step = 1.0 / 1024.0;
  double tolerance = 1e-8;
  int max_newton_iterations = 40;

  void validate() const;
};

/// Radial interval on which the hoop stress is compressive.
struct Annulus {
  double rho_min = 0.0;
  double rho_max = 0.0;
};

struct ShellSolution {
  std::vector<double> rho;
  std::vector<double> W;
  std::vector<double> slope;  // W'
  std::vector<double> Psi;
  std::vector<double> hoop_stress;    // Psi'
  std::vector<double> radial_stress;  // Psi / rho
  double W0 = 0.0;
  double force = 0.0;  // dimensionless f
  std::optional<Annulus> annulus;
  double tau = 0.0;
  bool membrane_limit = true;
  int newton_iterations = 0;  // summed over continuation steps
  double max_residual = 0.0;

  double inner_radius() const { return rho.front(); }
  double outer_radius() const { return rho.back(); }

  /// |W(rho_inf)|.
  double far_field_displacement() const;
  /// |Psi(rho_inf) - rho_inf / 2|.
  double far_field_stress_offset() const;
  /// |Psi(rho_inf) - rho_inf / 2 + f / (2 pi rho_inf)|: deviation from the exact
  /// decaying asymptote of a point-loaded shell.
  double far_field_asymptote_error() const;
  /// Linear interpolation of W at rho; W0 below the inner radius, 0 beyond rho_inf.
  double displacement_at(double rho) const;
  double min_hoop_stress() const;
};

/// Solves for the profile at prescribed depth W0 <= 0, continuing from the
/// unindented state in steps of at most options.max_continuation_step.
ShellSolution solve_indentation(const ShellParams& params, double W0, const SolverOptions& options = {});

/// Solves at every depth in `depths` (each <= 0), reusing each converged
/// profile as the starting point for the next. Depths are visited in the
/// given order; results are returned in the same order.
std::vector<ShellSolution> solve_sweep(const ShellParams& params, const std::vector<double>& depths,
                                       const SolverOptions& options = {});

struct CriticalDepth {
  double W0 = 0.0;  // first depth at which the hoop stress turns compressive
  int bisection_iterations = 0;
  double bracket_shallow = 0.0;
  double bracket_deep = 0.0;
  std::vector<std::string> warnings;
};

struct CriticalDepthOptions {
  SolverOptions solver;
  double tolerance = 1e-3;
  double shallow_bound = -1.0;
  double deep_bound = -4.0;
  int max_iterations = 20;
};

/// Bisection on W0 for the onset of negative hoop stress. Expected near -2.52.
CriticalDepth critical_depth(const ShellParams& params, const CriticalDepthOptions& options = {});

struct WrinkleCount {
  double unrounded = 0.0;  // 1.33 sqrt(tau)
  int count = 0;           // rounded half-up
};

WrinkleCount wrinkle_count(const ShellParams& params);
WrinkleCount wrinkle_count_for_tau(double tau);

/// Deep-indentation shape: the indented region mirrors the undeformed cap.
/// W(rho) = W0 + rho^2 for rho <= |W0|^(1/2), zero outside.
class CapProfile {
 public:
  explicit CapProfile(double W0);
  double W0() const noexcept { return W0_; }
  double contact_radius() const noexcept;
  double operator()(double rho) const noexcept;
  /// Set when |W0| < 1, outside the deep-indentation regime.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  double W0_;
  std::vector<std::string> warnings_;
};

/// Volume displaced by a deep indentation of magnitude w0 (m): pi R w0^2 / 2.
double cap_volume_change(const ShellParams& params, double w0);

/// CSV with header `rho,W,Psi,hoop_stress,radial_stress`.
void write_solution_csv(std::ostream& out, const ShellSolution& solution);

}  // namespace shellprobe
