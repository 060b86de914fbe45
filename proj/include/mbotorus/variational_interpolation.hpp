#pragma once

#include <vector>

#include "mbotorus/energy_metric.hpp"
#include "mbotorus/torus_field.hpp"
#include "mbotorus/trajectory.hpp"

namespace mbotorus {

/// Minimizer u(r) of F_r(u) = d_h²(u, χ_prev)/(2r) + E_h(u) over [0,1]-valued
/// fields, at elapsed intra-step time r.
struct InterpolationRecord {
  double r = 0.0;
  ScalarField u;
  /// e(r) = F_r(u(r)).
  double objective = 0.0;
  /// E_h(u(r)).
  double energy = 0.0;
  /// d_h(u(r), χ_prev).
  double dist = 0.0;
  /// dist / r.
  double slope_upper = 0.0;
  int iterations = 0;
  /// Norm of the projected gradient at exit.
  double residual = 0.0;
  /// Frank–Wolfe duality gap, an upper bound on objective - min F_r.
  double gap = 0.0;
  bool converged = false;
};

struct InterpolationOptions {
  double tol = 1e-8;
  int max_iterations = 200000;
};

/// Projected gradient with step 1/L, L = 2√h/r + 2/√h, started from `start`
/// (χ_prev when null). For r = h the objective is affine and the threshold
/// output is returned.
InterpolationRecord interpolate(const ScalarField& chi_prev, double h, double r,
                                const InterpolationOptions& options = {},
                                const ScalarField* start = nullptr);

/// `nodes` geometric points from h/span to h, increasing.
std::vector<double> geometric_r_grid(double h, int nodes = 16, double span = 256.0);

struct DeGiorgiReport {
  std::vector<InterpolationRecord> nodes;
  /// distance_monotone, energy_difference_bounds, integrated_slope,
  /// step_budget, energy_below_anchor.
  InequalityReport checks;
  /// ∫ d²(u(r))/(2r²) dr over the grid by the trapezoid rule in log r.
  double slope_integral = 0.0;
  /// The same integral bounded from below by the left Riemann sum
  /// (d² is nondecreasing in r). integrated_slope and step_budget use this.
  double slope_integral_lower = 0.0;
  /// E_h(χ_prev) - e(h) - slope_integral; its deficit is quadrature error.
  double trapezoid_slack = 0.0;
  double anchor_energy = 0.0;
};

/// Solves the interpolation at every node (warm started from the previous
/// node) and evaluates the per-step inequalities between e, d and E.
/// Pair inequalities are credited with the solver's certified gap.
DeGiorgiReport degiorgi_step_check(const ScalarField& chi_prev, const ScalarField& chi_next, double h,
                                   const std::vector<double>& r_grid, const InterpolationOptions& options = {});

struct BudgetReport {
  /// Σ_n ∫_0^h d²(u(r), χⁿ⁻¹)/(2h²) dr.
  double budget = 0.0;
  double initial_energy = 0.0;
  /// Smallest E_h(χⁿ⁻¹) - E_h(u(r)) over all steps and nodes.
  double min_energy_slack = 0.0;
  std::vector<DeGiorgiReport> steps;

  [[nodiscard]] double slack() const noexcept { return initial_energy - budget; }
};

/// Runs degiorgi_step_check on steps [first_step, last_step] of the
/// trajectory (all steps by default) and aggregates the interpolation budget.
BudgetReport interpolation_budget(const Trajectory& traj, const std::vector<double>& r_grid,
                                  const InterpolationOptions& options = {}, int first_step = 1,
                                  int last_step = -1);

}  // namespace mbotorus
