#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/torus_field.hpp"
#include "mbotorus/trajectory.hpp"

namespace mbotorus {

/// Approximate interfacial energy E_h(u) = h^{-1/2} ∫ (1-u) G_h*u dx.
double energy(const ScalarField& u, double h);
double energy(const ScalarField& u, const HeatMultiplier& kernel);

/// Induced metric d_h(u,u') = (2√h ∫ |G_{h/2}*(u-u')|²)^{1/2}, evaluated in
/// Fourier space as (2√h Σ_k exp(-h|k|²/2) |F(u-u')(k)|²)^{1/2}.
double metric(const ScalarField& u, const ScalarField& v, double h);
double metric_sq(const ScalarField& u, const ScalarField& v, double h);

/// d_h(χ,χ')² / (2h²).
double dissipation_step(const ScalarField& chi, const ScalarField& chi_prev, double h);

// ---------------------------------------------------------------------------

/// One checked inequality: slack = rhs - lhs, expected >= 0.
struct InequalityCheck {
  std::string name;
  std::optional<double> slack;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Non-empty when the precondition failed and the check was skipped.
  std::string precondition_violation;
  /// Certified numerical error bound already credited to the slack.
  double allowance = 0.0;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;

  [[nodiscard]] const InequalityCheck& at(const std::string& name) const;
  /// True if every evaluated slack is >= tolerance (skipped checks ignored).
  [[nodiscard]] bool all_hold(double tolerance = -1e-10) const;
  [[nodiscard]] double min_slack() const;
};

/// (1-u)u' + u(1-u') - |u-u'| for scalars in [0,1].
double pointwise_product_slack(double u, double v) noexcept;

/// Elementary inequalities between E_h, d_h and the smoothing defect:
///  smoothing_defect_l1      ∫|u - G_h*u| <= 2√h E_h(u)
///  energy_monotone_in_h     E_{h0}(u) <= E_h(u), h0/h a perfect square
///  energy_subadditive       √h0 E_{h0} <= √h E_h + √h' E_{h'},  √h0 = √h + √h'
///  smoothing_defect_l2      ∫(u - G_{h0}*u)² <= 4√h0 E_h(u), h0 >= h
///  symmetric_difference     ∫|χ-χ'| <= d_h²/(2√h) + 2√h (E_h(χ)+E_h(χ')), indicators
///  pointwise_product_bound  |u-u'| <= (1-u)u' + u(1-u') pointwise
/// The single-field checks are evaluated on both u and u' and report the
/// smaller slack.
InequalityReport inequality_suite(const ScalarField& u, const ScalarField& v, double h, double h0);

// ---------------------------------------------------------------------------

struct TimeModulus {
  double shift = 0.0;
  /// I(s) = ∫_s^T ∫ |χ(t) - χ(t-s)| dx dt.
  double integral = 0.0;
  /// C0 = ∫_h^T d_h²(χ(t),χ(t-h))/(2h²) dt + 4 ∫_0^T E_h(χ(t)) dt.
  double c0_constant = 0.0;
  /// 4 C0 √s.
  double bound = 0.0;
  /// Piecewise bound C0·{s/√h, 2√h, 4s} that sits below `bound`.
  double piecewise_bound = 0.0;
};

/// Modulus of continuity in time for the piecewise-constant trajectory,
/// with horizon T = traj.horizon().
TimeModulus time_modulus(const Trajectory& traj, double s, double h);

}  // namespace mbotorus
