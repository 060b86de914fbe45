#pragma once

#include <cstddef>

#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/torus_field.hpp"
#include "mbotorus/trajectory.hpp"

namespace mbotorus {

/// One thresholding step: 1 where G_h*χ > 1/2, 0 elsewhere (ties go to 0).
ScalarField threshold_step(const ScalarField& chi, const HeatMultiplier& kernel);

/// Minimizing-movements objective d_h²(u, χ_prev)/(2h) + E_h(u).
double mm_functional(const ScalarField& u, const ScalarField& chi_prev, double h);

struct BruteForceResult {
  ScalarField minimizer;
  double objective = 0.0;
  /// Number of binary fields attaining the minimum (relative tolerance 1e-12).
  std::size_t minimizer_count = 0;
};

/// Largest grid (in cells) accepted by brute_force_step.
inline constexpr std::size_t kBruteForceMaxCells = 16;

/// Exhaustive minimization of mm_functional over all binary fields. Among
/// several minimizers the one with the fewest set cells is returned, which is
/// the one the strict-threshold tie rule selects.
BruteForceResult brute_force_step(const ScalarField& chi, double h);

/// Runs ceil(T/h) thresholding steps from chi0 and fills the energy ledger.
/// Records a warning when √h < 4Δx (interfaces tend to pin).
Trajectory run(const ScalarField& chi0, double h, double T);

/// Radius of the disc (d=2) or ball (d=3) with the same volume; interval half-length for d=1.
double equivalent_radius(double volume, int dim);

}  // namespace mbotorus
