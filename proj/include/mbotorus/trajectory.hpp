#pragma once

#include <string>
#include <vector>

#include "mbotorus/torus_field.hpp"

namespace mbotorus {

/// Per-step energy budget of a thresholding run.
struct LedgerEntry {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;            // E_h(χⁿ)
  double metric_increment = 0.0;  // d_h(χⁿ, χⁿ⁻¹)
  double dissipation = 0.0;       // d_h² / (2h²)
  double volume = 0.0;            // ∫ χⁿ
};

/// Thresholding iterates χ⁰..χᴺ, read as a piecewise-constant curve in time:
/// χ(t) = χⁿ on [nh, (n+1)h) and χ(t) = χ⁰ for t <= 0. The curve is
/// considered on [0, (N+1)h) so that every stored state carries weight h.
struct Trajectory {
  double h = 0.0;
  GridSpec grid{};
  std::vector<ScalarField> states;
  std::vector<LedgerEntry> ledger;
  /// √h / Δx; thresholding pins interfaces when this is O(1).
  double pinning_ratio = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] int steps() const noexcept { return static_cast<int>(states.size()) - 1; }
  [[nodiscard]] double horizon() const noexcept { return h * static_cast<double>(states.size()); }
  [[nodiscard]] std::size_t index_at(double t) const noexcept;
  [[nodiscard]] const ScalarField& state_at(double t) const noexcept { return states[index_at(t)]; }
};

}  // namespace mbotorus
