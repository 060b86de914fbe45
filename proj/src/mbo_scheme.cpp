#include "mbotorus/mbo_scheme.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mbotorus/energy_metric.hpp"

namespace mbotorus {

ScalarField threshold_step(const ScalarField& chi, const HeatMultiplier& kernel) {
  const auto smoothed = convolve(kernel, dft(chi));
  ScalarField out(chi.grid());
  for (std::size_t i = 0; i < chi.size(); ++i) out[i] = smoothed[i] > 0.5 ? 1.0 : 0.0;
  return out;
}

double mm_functional(const ScalarField& u, const ScalarField& chi_prev, double h) {
  require_same_grid(u, chi_prev, "mm_functional");
  if (!u.in_unit_interval()) throw std::invalid_argument("mm_functional: u must be [0,1]-valued");
  return metric_sq(u, chi_prev, h) / (2.0 * h) + energy(u, h);
}

BruteForceResult brute_force_step(const ScalarField& chi, double h) {
  const auto& grid = chi.grid();
  const std::size_t cells = grid.size();
  if (cells > kBruteForceMaxCells) {
    throw std::invalid_argument("brute_force_step: grid has more than 16 cells");
  }
  if (!chi.is_indicator()) throw std::invalid_argument("brute_force_step: χ must be an indicator");

  // Dense periodic kernel matrix: column j is G_h applied to the j-th unit field.
  const HeatMultiplier kernel(grid, h);
  std::vector<double> K(cells * cells);
  for (std::size_t j = 0; j < cells; ++j) {
    ScalarField unit(grid);
    unit[j] = 1.0;
    const auto col = convolve(kernel, dft(unit));
    for (std::size_t i = 0; i < cells; ++i) K[i * cells + j] = col[i];
  }
  // With <a,b> = Δx^d/√h Σ a_i (K b)_i the objective is <u-χ,u-χ> + <1-u,u>.
  const double scale = grid.cell_volume() / std::sqrt(h);
  auto objective = [&](const std::vector<double>& u) {
    double quad = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      double kv = 0.0;
      double ku = 0.0;
      for (std::size_t j = 0; j < cells; ++j) {
        kv += K[i * cells + j] * (u[j] - chi[j]);
        ku += K[i * cells + j] * u[j];
      }
      quad += (u[i] - chi[i]) * kv;
      cross += (1.0 - u[i]) * ku;
    }
    return scale * (quad + cross);
  };

  const std::uint64_t states = std::uint64_t{1} << cells;
  std::vector<double> u(cells);
  std::vector<double> values(states);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < cells; ++i) u[i] = ((s >> i) & 1U) ? 1.0 : 0.0;
    values[s] = objective(u);
    best = std::min(best, values[s]);
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  BruteForceResult result;
  std::uint64_t chosen = 0;
  int chosen_pop = std::numeric_limits<int>::max();
  for (std::uint64_t s = 0; s < states; ++s) {
    if (values[s] - best > tol) continue;
    ++result.minimizer_count;
    const int pop = std::popcount(s);
    if (pop < chosen_pop) {
      chosen_pop = pop;
      chosen = s;
    }
  }
  result.minimizer = ScalarField(grid);
  for (std::size_t i = 0; i < cells; ++i) result.minimizer[i] = ((chosen >> i) & 1U) ? 1.0 : 0.0;
  result.objective = values[chosen];
  return result;
}

double equivalent_radius(double volume, int dim) {
  switch (dim) {
    case 1:
      return 0.5 * volume;
    case 2:
      return std::sqrt(volume / std::numbers::pi);
    case 3:
      return std::cbrt(3.0 * volume / (4.0 * std::numbers::pi));
    default:
      throw std::invalid_argument("equivalent_radius: dimension must be 1..3");
  }
}

Trajectory run(const ScalarField& chi0, double h, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("run: T must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("run: h must be positive");
  if (!chi0.is_indicator()) throw std::invalid_argument("run: initial field must be an indicator");

  Trajectory traj;
  traj.h = h;
  traj.grid = chi0.grid();
  traj.pinning_ratio = std::sqrt(h) / traj.grid.spacing();
  if (traj.pinning_ratio < 4.0) {
    std::ostringstream msg;
    msg << "sqrt(h)/dx = " << traj.pinning_ratio << " < 4: interfaces may pin";
    traj.warnings.push_back(msg.str());
  }

  const auto steps = static_cast<int>(std::ceil(T / h - 1e-9));
  const HeatMultiplier kernel(traj.grid, h);
  traj.states.reserve(steps + 1);
  traj.ledger.reserve(steps + 1);
  traj.states.push_back(chi0);
  traj.ledger.push_back(LedgerEntry{0, 0.0, energy(chi0, kernel), 0.0, 0.0, integrate(chi0)});
  for (int n = 1; n <= steps; ++n) {
    auto next = threshold_step(traj.states.back(), kernel);
    const double dist_sq = metric_sq(next, traj.states.back(), h);
    LedgerEntry entry;
    entry.step = n;
    entry.time = n * h;
    entry.energy = energy(next, kernel);
    entry.metric_increment = std::sqrt(dist_sq);
    entry.dissipation = dist_sq / (2.0 * h * h);
    entry.volume = integrate(next);
    traj.ledger.push_back(entry);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

}  // namespace mbotorus
