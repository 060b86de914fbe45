#include "mbotorus/variational_interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "mbotorus/mbo_scheme.hpp"

namespace mbotorus {

namespace {

/// Objective pieces that only need G_h*u, G_h*χ and the fields themselves.
struct Evaluation {
  double objective = 0.0;
  double dist_sq = 0.0;
  double energy = 0.0;
};

Evaluation evaluate(const ScalarField& u, const ScalarField& gu, const ScalarField& chi,
                    const ScalarField& gchi, double h, double r) {
  double cross = 0.0;
  double interface = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cross += (u[i] - chi[i]) * (gu[i] - gchi[i]);
    interface += (1.0 - u[i]) * gu[i];
  }
  const double vol = u.grid().cell_volume();
  const double sh = std::sqrt(h);
  Evaluation e;
  e.dist_sq = std::max(0.0, 2.0 * sh * cross * vol);
  e.energy = interface * vol / sh;
  e.objective = e.dist_sq / (2.0 * r) + e.energy;
  return e;
}

void fill_record(InterpolationRecord& rec, const Evaluation& e) {
  rec.objective = e.objective;
  rec.energy = e.energy;
  rec.dist = std::sqrt(e.dist_sq);
  rec.slope_upper = rec.dist / rec.r;
}

}  // namespace

InterpolationRecord interpolate(const ScalarField& chi_prev, double h, double r,
                                const InterpolationOptions& options, const ScalarField* start) {
  if (!(h > 0.0)) throw std::invalid_argument("interpolate: h must be positive");
  if (!(r > 0.0) || r > h * (1.0 + 1e-12)) throw std::invalid_argument("interpolate: r must lie in (0, h]");
  if (!chi_prev.is_indicator()) throw std::invalid_argument("interpolate: χ_prev must be an indicator");
  if (start != nullptr) {
    require_same_grid(*start, chi_prev, "interpolate");
    if (!start->in_unit_interval()) throw std::invalid_argument("interpolate: start must be [0,1]-valued");
  }

  const auto& grid = chi_prev.grid();
  const HeatMultiplier kernel(grid, h);
  const auto gchi = convolve(kernel, dft(chi_prev));
  const double sh = std::sqrt(h);
  const double vol = grid.cell_volume();

  InterpolationRecord rec;
  rec.r = r;

  // Gradient (2√h/r) G(u-χ) + (1 - 2Gu)/√h, together with the projected
  // gradient norm and the Frank–Wolfe gap at u.
  auto gradient = [&](const ScalarField& u, const ScalarField& gu, ScalarField& g) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      g[i] = (2.0 * sh / r) * (gu[i] - gchi[i]) + (1.0 - 2.0 * gu[i]) / sh;
    }
  };
  auto stationarity = [&](const ScalarField& u, const ScalarField& g, double L, double& residual,
                          double& gap) {
    double pg = 0.0;
    double fw = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double moved = std::clamp(u[i] - g[i] / L, 0.0, 1.0);
      const double p = L * (u[i] - moved);
      pg += p * p;
      fw += g[i] * u[i] - std::min(g[i], 0.0);
    }
    residual = std::sqrt(pg * vol);
    gap = std::max(0.0, fw * vol);
  };

  const double L = 2.0 * sh / r + 2.0 / sh;
  if (r >= h * (1.0 - 1e-12)) {
    rec.r = h;
    rec.u = threshold_step(chi_prev, kernel);
    const auto gu = convolve(kernel, dft(rec.u));
    fill_record(rec, evaluate(rec.u, gu, chi_prev, gchi, h, h));
    ScalarField g(grid);
    gradient(rec.u, gu, g);
    stationarity(rec.u, g, L, rec.residual, rec.gap);
    rec.converged = true;
    return rec;
  }

  ScalarField u = start != nullptr ? *start : chi_prev;
  ScalarField g(grid);
  ScalarField gu(grid);
  detail::RealMultiplier smoother(grid, kernel.values());
  smoother.apply(u.values(), gu.values());
  for (int it = 0;; ++it) {
    gradient(u, gu, g);
    stationarity(u, g, L, rec.residual, rec.gap);
    rec.iterations = it;
    if (rec.residual <= options.tol) {
      rec.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i] - g[i] / L, 0.0, 1.0);
    smoother.apply(u.values(), gu.values());
  }
  fill_record(rec, evaluate(u, gu, chi_prev, gchi, h, r));
  rec.u = std::move(u);
  return rec;
}

std::vector<double> geometric_r_grid(double h, int nodes, double span) {
  if (!(h > 0.0)) throw std::invalid_argument("geometric_r_grid: h must be positive");
  if (nodes < 2 || !(span > 1.0)) throw std::invalid_argument("geometric_r_grid: need >= 2 nodes and span > 1");
  std::vector<double> grid(nodes);
  for (int k = 0; k < nodes; ++k) {
    grid[k] = h * std::pow(span, -static_cast<double>(nodes - 1 - k) / (nodes - 1));
  }
  grid.back() = h;
  return grid;
}

DeGiorgiReport degiorgi_step_check(const ScalarField& chi_prev, const ScalarField& chi_next, double h,
                                   const std::vector<double>& r_grid, const InterpolationOptions& options) {
  require_same_grid(chi_prev, chi_next, "degiorgi_step_check");
  if (r_grid.size() < 8) throw std::invalid_argument("degiorgi_step_check: need at least 8 nodes");
  for (std::size_t k = 1; k < r_grid.size(); ++k) {
    if (!(r_grid[k] > r_grid[k - 1])) throw std::invalid_argument("degiorgi_step_check: r grid must increase");
  }
  if (std::abs(r_grid.back() - h) > 1e-12 * h) throw std::invalid_argument("degiorgi_step_check: r grid must end at h");

  DeGiorgiReport report;
  report.anchor_energy = energy(chi_prev, h);
  report.nodes.reserve(r_grid.size());
  const ScalarField* warm = nullptr;
  for (double r : r_grid) {
    report.nodes.push_back(interpolate(chi_prev, h, r, options, warm));
    if (!report.nodes.back().converged) {
      throw std::runtime_error("degiorgi_step_check: interpolation did not converge at r = " + std::to_string(r) +
                               ", residual " + std::to_string(report.nodes.back().residual));
    }
    warm = &report.nodes.back().u;
  }
  const auto& nodes = report.nodes;
  const std::size_t m = nodes.size();

  InequalityCheck monotone{"distance_monotone", std::numeric_limits<double>::infinity(), 0, 0, {}, 0};
  InequalityCheck bounds{"energy_difference_bounds", std::numeric_limits<double>::infinity(), 0, 0, {}, 0};
  for (std::size_t k = 1; k < m; ++k) {
    const auto& a = nodes[k - 1];
    const auto& b = nodes[k];
    const double s = a.r;
    const double t = b.r;
    const double ds = a.dist * a.dist;
    const double dt = b.dist * b.dist;
    const double quotient = (a.objective - b.objective) / (t - s);
    const double lower = ds / (2.0 * s * t);
    const double upper = dt / (2.0 * s * t);

    const double mono_allow = 2.0 * s * t * (a.gap + b.gap) / (t - s);
    const double mono_slack = dt - ds + mono_allow;
    if (mono_slack < *monotone.slack) monotone = {"distance_monotone", mono_slack, ds, dt, {}, mono_allow};

    const double lower_allow = b.gap / (t - s);
    const double upper_allow = a.gap / (t - s);
    const double lower_slack = quotient - lower + lower_allow;
    const double upper_slack = upper - quotient + upper_allow;
    if (lower_slack < *bounds.slack) bounds = {"energy_difference_bounds", lower_slack, lower, quotient, {}, lower_allow};
    if (upper_slack < *bounds.slack) bounds = {"energy_difference_bounds", upper_slack, quotient, upper, {}, upper_allow};
  }

  // ∫ d²/(2r²) dr = ∫ d²/(2r) dlog r.
  double trap = 0.0;
  double riemann = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const auto& a = nodes[k - 1];
    const auto& b = nodes[k];
    const double fa = a.dist * a.dist / (2.0 * a.r);
    const double fb = b.dist * b.dist / (2.0 * b.r);
    trap += 0.5 * (fa + fb) * std::log(b.r / a.r);
    riemann += 0.5 * a.dist * a.dist * (1.0 / a.r - 1.0 / b.r);
  }
  report.slope_integral = trap;
  report.slope_integral_lower = riemann;

  const auto& last = nodes.back();
  report.trapezoid_slack = report.anchor_energy - (last.objective + trap);
  InequalityCheck integrated{"integrated_slope", 0.0, last.objective + riemann, report.anchor_energy, {}, last.gap};
  integrated.slack = integrated.rhs - integrated.lhs + integrated.allowance;

  const double step_lhs = energy(chi_next, h) + metric_sq(chi_next, chi_prev, h) / (2.0 * h) + riemann;
  InequalityCheck step{"step_budget", report.anchor_energy - step_lhs, step_lhs, report.anchor_energy, {}, 0.0};

  InequalityCheck anchor{"energy_below_anchor", std::numeric_limits<double>::infinity(), 0, report.anchor_energy, {}, 0};
  for (const auto& rec : nodes) {
    const double worst = std::max(rec.energy, rec.objective);
    if (report.anchor_energy - worst < *anchor.slack) {
      anchor.slack = report.anchor_energy - worst;
      anchor.lhs = worst;
    }
  }

  report.checks.checks = {monotone, bounds, integrated, step, anchor};
  return report;
}

BudgetReport interpolation_budget(const Trajectory& traj, const std::vector<double>& r_grid,
                                  const InterpolationOptions& options, int first_step, int last_step) {
  if (traj.states.empty()) throw std::invalid_argument("interpolation_budget: empty trajectory");
  if (last_step < 0) last_step = traj.steps();
  if (first_step < 1 || last_step > traj.steps() || first_step > last_step + 1) {
    throw std::invalid_argument("interpolation_budget: step range out of bounds");
  }
  const double h = traj.h;
  BudgetReport report;
  report.initial_energy = energy(traj.states[first_step - 1], h);
  report.min_energy_slack = std::numeric_limits<double>::infinity();
  for (int n = first_step; n <= last_step; ++n) {
    auto step = degiorgi_step_check(traj.states[n - 1], traj.states[n], h, r_grid, options);
    // d² is nondecreasing in r, so the right Riemann sum with d²(0) = 0
    // bounds ∫_0^h d²/(2h²) dr from above.
    double prev_r = 0.0;
    for (const auto& rec : step.nodes) {
      report.budget += rec.dist * rec.dist / (2.0 * h * h) * (rec.r - prev_r);
      prev_r = rec.r;
      report.min_energy_slack = std::min(report.min_energy_slack, step.anchor_energy - rec.energy);
    }
    report.steps.push_back(std::move(step));
  }
  if (report.steps.empty()) report.min_energy_slack = 0.0;
  return report;
}

}  // namespace mbotorus
