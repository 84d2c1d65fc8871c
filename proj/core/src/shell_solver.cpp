#include "shellprobe/shell_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "shellprobe/error.hpp"

namespace shellprobe {

// ---------------------------------------------------------------------------
// ShellParams

void ShellParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(R)) throw ValidationError("shell radius R must be positive");
  if (!positive(h)) throw ValidationError("shell thickness h must be positive");
  if (!positive(E)) throw ValidationError("Young's modulus E must be positive");
  if (!positive(Pg)) throw ValidationError("gauge pressure Pg must be positive");
  if (!(nu > 0.0 && nu < 0.5)) throw ValidationError("Poisson's ratio must lie in (0, 0.5)");
  const double t = tau();
  if (!positive(t)) throw ValidationError("bendability tau is not finite and positive");
}

double ShellParams::bending_stiffness() const { return E * h * h * h / (12.0 * (1.0 - nu * nu)); }

double ShellParams::capillary_length() const { return std::sqrt(Pg * R * R * R / (E * h)); }

double ShellParams::tau() const { return Pg * R * R / std::sqrt(E * h * bending_stiffness()); }

double ShellParams::to_dimensionless_depth(double w) const {
  const double lp = capillary_length();
  return -w * R / (lp * lp);
}

double ShellParams::to_physical_depth(double W0) const {
  const double lp = capillary_length();
  return std::abs(W0) * lp * lp / R;
}

double ShellParams::to_physical_force(double f) const {
  const double lp = capillary_length();
  return f * Pg * lp * lp;
}

ShellParams ShellParams::with_tau(double tau, double R, double h, double nu, double Pg) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  ShellParams p;
  p.R = R;
  p.h = h;
  p.nu = nu;
  p.Pg = Pg;
  p.E = Pg * R * R * std::sqrt(12.0 * (1.0 - nu * nu)) / (tau * h * h);
  p.validate();
  return p;
}

void SolverOptions::validate() const {
  if (grid_size < 200) throw ValidationError("grid_size must be at least 200");
  if (!(rho_inf >= 20.0)) throw ValidationError("rho_inf must be at least 20");
  if (!(inner_radius_ratio > 0.0 && inner_radius_ratio < 0.01)) {
    throw ValidationError("inner_radius_ratio must lie in (0, 0.01)");
  }
  if (!(max_continuation_step > 0.0 && max_continuation_step <= 0.25)) {
    throw ValidationError("continuation steps must lie in (0, 0.25]");
  }
  if (!(min_continuation_step > 0.0 && min_continuation_step <= max_continuation_step)) {
    throw ValidationError("min_continuation_step must lie in (0, max_continuation_step]");
  }
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_newton_iterations < 1) throw ValidationError("max_newton_iterations must be >= 1");
}

// ---------------------------------------------------------------------------
// ShellSolution

double ShellSolution::far_field_displacement() const { return std::abs(W.back()); }

double ShellSolution::far_field_stress_offset() const { return std::abs(Psi.back() - 0.5 * rho.back()); }

double ShellSolution::far_field_asymptote_error() const {
  const double r = rho.back();
  return std::abs(Psi.back() - 0.5 * r + force / (2.0 * std::numbers::pi * r));
}

double ShellSolution::displacement_at(double r) const {
  if (r <= rho.front()) return W.front();
  if (r >= rho.back()) return 0.0;
  auto it = std::upper_bound(rho.begin(), rho.end(), r);
  const auto i = static_cast<std::size_t>(it - rho.begin());
  const double t = (r - rho[i - 1]) / (rho[i] - rho[i - 1]);
  return (1.0 - t) * W[i - 1] + t * W[i];
}

double ShellSolution::min_hoop_stress() const { return *std::min_element(hoop_stress.begin(), hoop_stress.end()); }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDim = 5;

using Mat = Eigen::Matrix<double, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, kMaxDim, 1>;

/// Grid uniform in s = ln(rho / rho_0) + (rho - rho_0): geometric near the
/// inner boundary, close to uniform once rho is O(1).
std::vector<double> make_grid(int n, double rho0, double rho_inf) {
  auto s_of = [rho0](double r) { return std::log(r / rho0) + (r - rho0); };
  const double s_end = s_of(rho_inf);
  std::vector<double> rho(static_cast<std::size_t>(n));
  double r = rho0;
  for (int i = 0; i < n; ++i) {
    const double s = s_end * static_cast<double>(i) / static_cast<double>(n - 1);
    for (int it = 0; it < 60; ++it) {
      const double g = s_of(r) - s;
      const double dr = g / (1.0 / r + 1.0);
      r = std::max(r - dr, 0.5 * r);
      if (std::abs(dr) <= 1e-15 * r) break;
    }
    rho[static_cast<std::size_t>(i)] = r;
  }
  rho.front() = rho0;
  rho.back() = rho_inf;
  return rho;
}

struct LinearBc {
  bool right = false;
  std::array<double, kMaxDim> coeff{};
  double rhs = 0.0;
};

/// First-order form of the shell equations, trapezoidal collocation on a
/// fixed grid, force f appended as the last unknown.
class ShellBvp {
 public:
  ShellBvp(const ShellParams& params, const SolverOptions& options) : params_(params), options_(options) {
    tau2_ = params.tau() * params.tau();
    membrane_ = options.membrane_limit;
    dim_ = membrane_ ? 3 : 5;
    const double rho0 = options.inner_radius_ratio * options.rho_inf;
    rho_ = make_grid(options.grid_size, rho0, options.rho_inf);
  }

  int dim() const { return dim_; }
  int nodes() const { return static_cast<int>(rho_.size()); }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(dim_) * nodes() + 1; }
  const std::vector<double>& grid() const { return rho_; }
  int psi_index() const { return membrane_ ? 1 : 3; }
  int phi_index() const { return membrane_ ? 2 : 4; }

  Eigen::VectorXd trivial_state() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(unknowns());
    for (int i = 0; i < nodes(); ++i) {
      x(at(i, psi_index())) = 0.5 * rho_[static_cast<std::size_t>(i)];
      x(at(i, phi_index())) = 0.5;
    }
    return x;
  }

  bool admissible(const Eigen::VectorXd& x) const {
    if (!x.allFinite()) return false;
    if (!membrane_) return true;
    for (int i = 0; i < nodes(); ++i) {
      if (!(x(at(i, 1)) > 0.0)) return false;
    }
    return true;
  }

  /// Damped Newton at fixed W0. Returns false if it fails to converge.
  bool newton(double W0, Eigen::VectorXd& x, int& iterations, double& residual_norm) {
    set_boundary_conditions(W0);
    Eigen::VectorXd r = residual(x);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < options_.max_newton_iterations; ++it) {
      if (norm < options_.tolerance) {
        residual_norm = norm;
        return true;
      }
      jacobian(x);
      if (!pattern_ready_) {
        solver_.analyzePattern(jac_);
        pattern_ready_ = true;
      }
      solver_.factorize(jac_);
      if (solver_.info() != Eigen::Success) return false;
      const Eigen::VectorXd dx = solver_.solve(-r);
      if (solver_.info() != Eigen::Success || !dx.allFinite()) return false;

      const double merit = r.norm();
      bool accepted = false;
      for (double lambda = 1.0; lambda >= 1.0 / 512.0; lambda *= 0.5) {
        Eigen::VectorXd trial = x + lambda * dx;
        if (!admissible(trial)) continue;
        Eigen::VectorXd rt = residual(trial);
        if (!rt.allFinite()) continue;
        if (rt.norm() < (1.0 - 1e-4 * lambda) * merit) {
          x = std::move(trial);
          r = std::move(rt);
          accepted = true;
          break;
        }
      }
      ++iterations;
      if (!accepted) return false;
      norm = r.lpNorm<Eigen::Infinity>();
    }
    residual_norm = norm;
    return norm < options_.tolerance;
  }

  Eigen::Index at(int node, int comp) const { return static_cast<Eigen::Index>(node) * dim_ + comp; }

 private:
  void set_boundary_conditions(double W0) {
    const double nu = params_.nu;
    const double r0 = rho_.front();
    const double rinf = rho_.back();
    bcs_.clear();
    auto add = [&](bool right, std::initializer_list<std::pair<int, double>> terms, double rhs) {
      LinearBc bc;
      bc.right = right;
      for (auto [k, c] : terms) bc.coeff[static_cast<std::size_t>(k)] = c;
      bc.rhs = rhs;
      bcs_.push_back(bc);
    };
    const int psi = psi_index();
    const int phi = phi_index();
    // Prescribed depth at the inner boundary.
    add(false, {{0, 1.0}}, W0);
    if (!membrane_) add(false, {{1, 1.0}}, 0.0);  // clamped slope under the indenter
    // Zero horizontal displacement, rho Psi' - nu Psi -> 0, applied to the
    // indentation-induced part of Psi (the prestress Psi = rho/2 is exact).
    add(false, {{phi, r0}, {psi, -nu}}, 0.5 * (1.0 - nu) * r0);
    add(true, {{0, 1.0}}, 0.0);
    if (!membrane_) add(true, {{1, 1.0}}, 0.0);
    // Decaying far field: (rho Psi)' = rho.
    add(true, {{phi, rinf}, {psi, 1.0}}, rinf);
  }

  void rhs(double rho, const double* y, double f, Vec& g, Mat& dgdy, Vec& dgdf) const {
    g.setZero();
    dgdy.setZero();
    dgdf.setZero();
    if (membrane_) {
      const double psi = y[1];
      const double phi = y[2];
      const double a = f / kTwoPi - 0.5 * rho * rho;
      const double q = rho + a / psi;  // W'
      const double dq_dpsi = -a / (psi * psi);
      const double dq_df = 1.0 / (kTwoPi * psi);
      g(0) = q;
      g(1) = phi;
      g(2) = -phi / rho + psi / (rho * rho) + q - q * q / (2.0 * rho);
      dgdy(0, 1) = dq_dpsi;
      dgdf(0) = dq_df;
      dgdy(1, 2) = 1.0;
      const double dg2_dq = 1.0 - q / rho;
      dgdy(2, 1) = 1.0 / (rho * rho) + dg2_dq * dq_dpsi;
      dgdy(2, 2) = -1.0 / rho;
      dgdf(2) = dg2_dq * dq_df;
    } else {
      const double theta = y[1];
      const double kappa = y[2];
      const double psi = y[3];
      const double phi = y[4];
      g(0) = theta;
      g(1) = kappa;
      g(2) = -kappa / rho + theta / (rho * rho) + tau2_ * (0.5 * rho - f / (kTwoPi * rho) - psi + psi * theta / rho);
      g(3) = phi;
      g(4) = -phi / rho + psi / (rho * rho) + theta - theta * theta / (2.0 * rho);
      dgdy(0, 1) = 1.0;
      dgdy(1, 2) = 1.0;
      dgdy(2, 1) = 1.0 / (rho * rho) + tau2_ * psi / rho;
      dgdy(2, 2) = -1.0 / rho;
      dgdy(2, 3) = tau2_ * (theta / rho - 1.0);
      dgdf(2) = -tau2_ / (kTwoPi * rho);
      dgdy(3, 4) = 1.0;
      dgdy(4, 1) = 1.0 - theta / rho;
      dgdy(4, 3) = 1.0 / (rho * rho);
      dgdy(4, 4) = -1.0 / rho;
    }
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const int m = dim_;
    const int n = nodes();
    const double f = x(unknowns() - 1);
    Eigen::VectorXd r(unknowns());
    Eigen::Index row = 0;
    for (const auto& bc : bcs_) {
      if (bc.right) continue;
      double s = -bc.rhs;
      for (int k = 0; k < m; ++k) s += bc.coeff[static_cast<std::size_t>(k)] * x(at(0, k));
      r(row++) = s;
    }
    Vec g_prev, g_next, dgdf;
    Mat dgdy;
    rhs(rho_[0], x.data() + at(0, 0), f, g_prev, dgdy, dgdf);
    for (int i = 0; i + 1 < n; ++i) {
      const double hstep = rho_[static_cast<std::size_t>(i + 1)] - rho_[static_cast<std::size_t>(i)];
      rhs(rho_[static_cast<std::size_t>(i + 1)], x.data() + at(i + 1, 0), f, g_next, dgdy, dgdf);
      for (int k = 0; k < m; ++k) {
        r(row++) = x(at(i + 1, k)) - x(at(i, k)) - 0.5 * hstep * (g_prev(k) + g_next(k));
      }
      g_prev = g_next;
    }
    for (const auto& bc : bcs_) {
      if (!bc.right) continue;
      double s = -bc.rhs;
      for (int k = 0; k < m; ++k) s += bc.coeff[static_cast<std::size_t>(k)] * x(at(n - 1, k));
      r(row++) = s;
    }
    return r;
  }

  void jacobian(const Eigen::VectorXd& x) {
    const int m = dim_;
    const int n = nodes();
    const Eigen::Index fcol = unknowns() - 1;
    const double f = x(fcol);
    triplets_.clear();
    triplets_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m * (2 * m + 1)) + 16);
    Eigen::Index row = 0;
    for (const auto& bc : bcs_) {
      if (bc.right) continue;
      for (int k = 0; k < m; ++k) {
        if (bc.coeff[static_cast<std::size_t>(k)] != 0.0) {
          triplets_.emplace_back(row, at(0, k), bc.coeff[static_cast<std::size_t>(k)]);
        }
      }
      ++row;
    }
    Vec g_prev, g_next, df_prev, df_next;
    Mat J_prev, J_next;
    rhs(rho_[0], x.data() + at(0, 0), f, g_prev, J_prev, df_prev);
    for (int i = 0; i + 1 < n; ++i) {
      const double hstep = rho_[static_cast<std::size_t>(i + 1)] - rho_[static_cast<std::size_t>(i)];
      rhs(rho_[static_cast<std::size_t>(i + 1)], x.data() + at(i + 1, 0), f, g_next, J_next, df_next);
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          const double a = (k == l ? -1.0 : 0.0) - 0.5 * hstep * J_prev(k, l);
          const double b = (k == l ? 1.0 : 0.0) - 0.5 * hstep * J_next(k, l);
          if (a != 0.0) triplets_.emplace_back(row, at(i, l), a);
          if (b != 0.0) triplets_.emplace_back(row, at(i + 1, l), b);
        }
        // Keep the f column structurally present so the pattern is fixed.
        triplets_.emplace_back(row, fcol, -0.5 * hstep * (df_prev(k) + df_next(k)));
        ++row;
      }
      g_prev = g_next;
      J_prev = J_next;
      df_prev = df_next;
    }
    for (const auto& bc : bcs_) {
      if (!bc.right) continue;
      for (int k = 0; k < m; ++k) {
        if (bc.coeff[static_cast<std::size_t>(k)] != 0.0) {
          triplets_.emplace_back(row, at(n - 1, k), bc.coeff[static_cast<std::size_t>(k)]);
        }
      }
      ++row;
    }
    jac_.resize(unknowns(), unknowns());
    jac_.setFromTriplets(triplets_.begin(), triplets_.end());
    jac_.makeCompressed();
  }

  ShellParams params_;
  SolverOptions options_;
  double tau2_ = 0.0;
  bool membrane_ = true;
  int dim_ = 3;
  std::vector<double> rho_;
  std::vector<LinearBc> bcs_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseMatrix<double> jac_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver_;
  bool pattern_ready_ = false;
};

/// Walks W0 from the current converged state towards a target in bounded
/// steps, halving the step on Newton failure.
class Continuation {
 public:
  Continuation(const ShellParams& params, const SolverOptions& options)
      : params_(params), options_(options), bvp_(std::make_shared<ShellBvp>(params, options)) {
    x_ = bvp_->trivial_state();
  }

  void advance_to(double target) {
    if (W0_ == 0.0 && target != 0.0) depart_from_flat(target);
    double step = options_.max_continuation_step;
    while (W0_ != target) {
      const double gap = target - W0_;
      const double next = std::abs(gap) <= step ? target : W0_ + std::copysign(step, gap);
      if (try_step(next)) {
        step = std::min(options_.max_continuation_step, step * 1.5);
        continue;
      }
      step *= 0.5;
      if (step < options_.min_continuation_step) {
        std::ostringstream msg;
        msg << "shell solver failed to converge towards W0 = " << target << "; last converged W0 = " << W0_;
        throw NonconvergenceError(msg.str(), W0_);
      }
    }
  }

  ShellSolution solution() const {
    ShellSolution s;
    const auto& grid = bvp_->grid();
    const int n = bvp_->nodes();
    s.rho = grid;
    s.W.resize(grid.size());
    s.slope.resize(grid.size());
    s.Psi.resize(grid.size());
    s.hoop_stress.resize(grid.size());
    s.radial_stress.resize(grid.size());
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      s.W[u] = x_(bvp_->at(i, 0));
      s.Psi[u] = x_(bvp_->at(i, bvp_->psi_index()));
      s.hoop_stress[u] = x_(bvp_->at(i, bvp_->phi_index()));
      s.radial_stress[u] = s.Psi[u] / grid[u];
    }
    s.W0 = W0_;
    s.force = x_(bvp_->unknowns() - 1);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      s.slope[u] = options_.membrane_limit ? grid[u] + (s.force / kTwoPi - 0.5 * grid[u] * grid[u]) / s.Psi[u]
                                           : x_(bvp_->at(i, 1));
    }
    s.tau = params_.tau();
    s.membrane_limit = options_.membrane_limit;
    s.newton_iterations = iterations_;
    s.max_residual = residual_;
    s.annulus = find_annulus(s.rho, s.hoop_stress);
    return s;
  }

  double W0() const { return W0_; }

 private:
  bool try_step(double next) {
    Eigen::VectorXd guess = x_;
    if (has_previous_ && W0_ != W0_prev_) {
      const double t = (next - W0_) / (W0_ - W0_prev_);
      Eigen::VectorXd predicted = x_ + t * (x_ - x_prev_);
      if (bvp_->admissible(predicted)) guess = std::move(predicted);
    }
    double res = 0.0;
    if (!bvp_->newton(next, guess, iterations_, res)) {
      guess = x_;
      if (!bvp_->newton(next, guess, iterations_, res)) return false;
    }
    x_prev_ = x_;
    W0_prev_ = W0_;
    has_previous_ = true;
    x_ = std::move(guess);
    W0_ = next;
    residual_ = res;
    return true;
  }

  // Leaving the unindented state directly is slow when rho_0 is tiny: the
  // point-load core near rho_0 is absent from the flat profile and Newton
  // needs many small steps. Instead take the first step with a larger inner
  // radius and shrink it tenfold per stage, extending each profile inwards
  // with the core asymptote Psi - rho/2 ~ rho^(1/3).
  void depart_from_flat(double target) {
    constexpr double kCoarseRatio = 1e-3;
    if (options_.inner_radius_ratio >= kCoarseRatio) return;
    std::vector<double> ratios;
    for (double r = kCoarseRatio; r > options_.inner_radius_ratio * 1.0001; r *= 0.1) {
      ratios.push_back(r);
    }
    SolverOptions stage_opts = options_;
    stage_opts.inner_radius_ratio = ratios.front();
    Continuation stage(params_, stage_opts);
    try {
      stage.advance_to(std::max(target, -options_.max_continuation_step));
    } catch (const NonconvergenceError&) {
      return;
    }
    ShellSolution prev = stage.solution();
    int iters = stage.iterations_;
    for (std::size_t k = 1; k < ratios.size(); ++k) {
      stage_opts.inner_radius_ratio = ratios[k];
      Continuation next(params_, stage_opts);
      if (!next.seed_from(prev)) return;
      prev = next.solution();
      iters += next.iterations_;
    }
    if (seed_from(prev)) iterations_ += iters;
  }

  // Maps a converged profile with a larger inner radius onto this grid and
  // polishes it with Newton at the extrapolated inner displacement.
  bool seed_from(const ShellSolution& cs) {
    const auto& grid = bvp_->grid();
    const double rc = cs.rho.front();
    const double f = cs.force;
    const double core = cs.Psi.front() - 0.5 * rc;

    const int n = bvp_->nodes();
    const int m = bvp_->dim();
    Eigen::VectorXd seed = Eigen::VectorXd::Zero(bvp_->unknowns());
    auto interp = [&](const std::vector<double>& ys, double r) {
      auto it = std::upper_bound(cs.rho.begin(), cs.rho.end(), r);
      const auto i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cs.rho.begin()), 1, cs.rho.size() - 1);
      const double t = (r - cs.rho[i - 1]) / (cs.rho[i] - cs.rho[i - 1]);
      return (1.0 - t) * ys[i - 1] + t * ys[i];
    };
    std::vector<double> slope(cs.rho.size(), 0.0);
    for (std::size_t i = 0; i + 1 < cs.rho.size(); ++i) {
      slope[i] = (cs.W[i + 1] - cs.W[i]) / (cs.rho[i + 1] - cs.rho[i]);
    }
    slope.back() = 0.0;

    int inner_end = 0;  // first fine node at or beyond rc
    while (inner_end < n && grid[static_cast<std::size_t>(inner_end)] < rc) ++inner_end;
    for (int i = 0; i < n; ++i) {
      const double r = grid[static_cast<std::size_t>(i)];
      double psi;
      double phi;
      if (r < rc) {
        const double scale = std::cbrt(r / rc);
        psi = 0.5 * r + core * scale;
        phi = 0.5 + core * scale / (3.0 * r);
      } else {
        psi = interp(cs.Psi, r);
        phi = interp(cs.hoop_stress, r);
      }
      seed(bvp_->at(i, bvp_->psi_index())) = psi;
      seed(bvp_->at(i, bvp_->phi_index())) = phi;
      if (r >= rc) {
        seed(bvp_->at(i, 0)) = interp(cs.W, r);
        if (m == 5) seed(bvp_->at(i, 1)) = interp(slope, r);
      }
    }
    // Integrate W inwards through the extended core.
    auto wprime = [&](int i) {
      const double r = grid[static_cast<std::size_t>(i)];
      const double psi = seed(bvp_->at(i, bvp_->psi_index()));
      return r + (f / (2.0 * std::numbers::pi) - 0.5 * r * r) / psi;
    };
    for (int i = inner_end - 1; i >= 0; --i) {
      const double hstep = grid[static_cast<std::size_t>(i + 1)] - grid[static_cast<std::size_t>(i)];
      const double w_next = i + 1 < n ? seed(bvp_->at(i + 1, 0)) : 0.0;
      seed(bvp_->at(i, 0)) = w_next - 0.5 * hstep * (wprime(i) + wprime(i + 1));
    }
    seed(bvp_->unknowns() - 1) = f;
    if (m == 5) {
      // Bending model: clamped slope at rho_0; leave slopes and curvature of the
      // core at zero and let Newton build the boundary layer.
      for (int i = 0; i < inner_end; ++i) seed(bvp_->at(i, 1)) = 0.0;
    }
    if (!bvp_->admissible(seed)) return false;

    const double start = seed(bvp_->at(0, 0));
    double res = 0.0;
    Eigen::VectorXd x = seed;
    int iters = iterations_;
    if (!bvp_->newton(start, x, iters, res)) return false;
    iterations_ = iters;
    x_ = std::move(x);
    W0_ = start;
    residual_ = res;
    has_previous_ = false;
    return true;
  }

  static std::optional<Annulus> find_annulus(const std::vector<double>& rho, const std::vector<double>& hoop) {
    std::size_t first = hoop.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < hoop.size(); ++i) {
      if (hoop[i] < 0.0) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == hoop.size()) return std::nullopt;
    auto crossing = [&](std::size_t a, std::size_t b) {
      const double t = hoop[a] / (hoop[a] - hoop[b]);
      return rho[a] + t * (rho[b] - rho[a]);
    };
    Annulus ann;
    ann.rho_min = first > 0 ? crossing(first - 1, first) : rho[first];
    ann.rho_max = last + 1 < hoop.size() ? crossing(last, last + 1) : rho[last];
    return ann;
  }

  ShellParams params_;
  SolverOptions options_;
  // Shared by copies; it only caches the factorization workspace.
  std::shared_ptr<ShellBvp> bvp_;
  Eigen::VectorXd x_;
  Eigen::VectorXd x_prev_;
  double W0_ = 0.0;
  double W0_prev_ = 0.0;
  bool has_previous_ = false;
  int iterations_ = 0;
  double residual_ = 0.0;
};

void check_depth(double W0) {
  if (!(W0 <= 0.0) || !std::isfinite(W0)) {
    throw ValidationError("dimensionless indentation depth W0 must be <= 0");
  }
}

}  // namespace

ShellSolution solve_indentation(const ShellParams& params, double W0, const SolverOptions& options) {
  params.validate();
  options.validate();
  check_depth(W0);
  Continuation cont(params, options);
  cont.advance_to(W0);
  return cont.solution();
}

std::vector<ShellSolution> solve_sweep(const ShellParams& params, const std::vector<double>& depths,
                                       const SolverOptions& options) {
  params.validate();
  options.validate();
  for (double d : depths) check_depth(d);
  Continuation cont(params, options);
  std::vector<ShellSolution> out;
  out.reserve(depths.size());
  for (double d : depths) {
    cont.advance_to(d);
    out.push_back(cont.solution());
  }
  return out;
}

CriticalDepth critical_depth(const ShellParams& params, const CriticalDepthOptions& options) {
  params.validate();
  options.solver.validate();
  if (!(options.deep_bound < options.shallow_bound && options.shallow_bound <= 0.0)) {
    throw ValidationError("critical depth bracket must satisfy deep < shallow <= 0");
  }
  if (!(options.tolerance > 0.0)) throw ValidationError("bisection tolerance must be positive");

  CriticalDepth result;
  if (params.tau() < 10.0) {
    std::ostringstream msg;
    msg << "tau = " << params.tau() << " < 10: the membrane-limit threshold may not apply";
    result.warnings.push_back(msg.str());
  }

  // Continuation object parked at the shallow end of the current bracket.
  Continuation shallow(params, options.solver);
  shallow.advance_to(options.shallow_bound);
  if (shallow.solution().min_hoop_stress() < 0.0) {
    throw NumericalError("hoop stress already compressive at the shallow bracket end");
  }
  {
    Continuation deep = shallow;
    deep.advance_to(options.deep_bound);
    if (deep.solution().min_hoop_stress() >= 0.0) {
      throw NumericalError("hoop stress never turns compressive inside the bracket");
    }
  }

  double a = options.shallow_bound;  // tensile
  double b = options.deep_bound;     // compressive
  int iter = 0;
  while (std::abs(a - b) > options.tolerance) {
    if (iter >= options.max_iterations) {
      throw NonconvergenceError("critical-depth bisection exceeded its iteration cap", a);
    }
    const double mid = 0.5 * (a + b);
    Continuation probe = shallow;
    probe.advance_to(mid);
    if (probe.solution().min_hoop_stress() < 0.0) {
      b = mid;
    } else {
      a = mid;
      shallow = std::move(probe);
    }
    ++iter;
  }
  result.W0 = 0.5 * (a + b);
  result.bisection_iterations = iter;
  result.bracket_shallow = a;
  result.bracket_deep = b;
  return result;
}

WrinkleCount wrinkle_count_for_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
  WrinkleCount wc;
  wc.unrounded = kWrinkleScaling * std::sqrt(tau);
  wc.count = static_cast<int>(std::floor(wc.unrounded + 0.5));
  return wc;
}

WrinkleCount wrinkle_count(const ShellParams& params) {
  params.validate();
  return wrinkle_count_for_tau(params.tau());
}

CapProfile::CapProfile(double W0) : W0_(W0) {
  if (!(W0 <= 0.0) || !std::isfinite(W0)) {
    throw ValidationError("cap profile needs W0 <= 0 (indentation is inward)");
  }
  if (W0 > -1.0) {
    warnings_.push_back("|W0| < 1: the inverted-cap shape assumes deep indentation (W0 << -1)");
  }
}

double CapProfile::contact_radius() const noexcept { return std::sqrt(-W0_); }

double CapProfile::operator()(double rho) const noexcept {
  return std::abs(rho) <= contact_radius() ? W0_ + rho * rho : 0.0;
}

double cap_volume_change(const ShellParams& params, double w0) {
  if (!(params.R > 0.0)) throw ValidationError("shell radius R must be positive");
  if (!(w0 > 0.0) || !std::isfinite(w0)) {
    throw ValidationError("indentation magnitude w0 must be positive");
  }
  return 0.5 * std::numbers::pi * params.R * w0 * w0;
}

void write_solution_csv(std::ostream& out, const ShellSolution& s) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "rho,W,Psi,hoop_stress,radial_stress\n";
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    out << s.rho[i] << ',' << s.W[i] << ',' << s.Psi[i] << ',' << s.hoop_stress[i] << ',' << s.radial_stress[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace shellprobe
