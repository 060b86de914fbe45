#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mbotorus/torus_field.hpp"

namespace mbotorus {

using Vec3 = std::array<double, 3>;
/// jacobian[i][j] = ∂_j ξ_i.
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Smooth periodic vector field on the torus with its Jacobian in closed form.
struct VectorField {
  std::string label;
  int dim = 2;
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> jacobian;

  [[nodiscard]] double divergence(const Vec3& x) const;
};

VectorField constant_field(const Vec3& v, int dim);

/// (x - c) ψ(|x - c|) with a smooth cutoff ψ equal to 1 up to distance 0.4
/// and 0 from distance 0.5 on, so the field is periodic.
VectorField dilation_field(const Vec3& center, int dim);

/// cos(2π m·x) e_axis, or sin(2π m·x) e_axis.
VectorField trig_mode(const std::array<int, 3>& m, int axis, bool sine, int dim);

/// All cos/sin modes with |m|_∞ <= K, one of each ±m pair, times every axis:
/// d (2K+1)^d fields spanning the same space as the full ±m list.
std::vector<VectorField> trig_basis(int dim, int K);

/// Σ_j c_j ξ_j.
VectorField combine(const std::vector<VectorField>& fields, const std::vector<double>& coeffs);

/// Sampled components and analytic divergence at cell centers.
struct SampledVectorField {
  std::array<ScalarField, 3> component;
  ScalarField divergence;
};

SampledVectorField sample(const VectorField& xi, const GridSpec& grid);

/// Solution at time s of ∂_s u + ξ·∇u = 0: u_s(x) = u(Φ_{-s}(x)), with the
/// backward characteristic integrated by two midpoint substeps and u read
/// off its trigonometric interpolant. Requires |s| max|ξ| <= Δx/4.
ScalarField transport(const ScalarField& u, const VectorField& xi, double s);

/// Evaluates the trigonometric interpolant of f at arbitrary points.
std::vector<double> interpolate_at(const ScalarField& f, const std::vector<Vec3>& points);

/// δE_h(u).ξ = h^{-1/2} ∫ ∇·ξ [(1-u)G_h*u + uG_h*(1-u)] + u [ξ, ∇G_h*](1-u),
/// with the commutator Σ_i ξ_i ∂_iG_h*(1-u) - ∂_iG_h*(ξ_i(1-u)).
double delta_energy(const ScalarField& u, double h, const VectorField& xi);

/// δE_h(u).ξ_j for a batch of fields through the equivalent linear form
/// h^{-1/2} ∫ ∇·ξ P + Σ_i ξ_i W_i.
std::vector<double> delta_energy_batch(const ScalarField& u, double h, const std::vector<VectorField>& fields);

/// ½ (δd_h(u,·)(u).ξ)² from the four-term expression
/// √h ∫ uξ·∇²G_h*((1-u)ξ) - uξ·∇G_h*((1-u)∇·ξ) + u∇·ξ ∇G_h*·((1-u)ξ) - u∇·ξ G_h*((1-u)∇·ξ).
double delta_metric_sq(const ScalarField& u, double h, const VectorField& xi);

/// Gram matrix (row-major) of the quadratic form ξ ↦ 2 delta_metric_sq(u, h, ξ)
/// on a batch of fields, i.e. its polarization. The four-term form is
/// evaluated as -√h <G_{h/2}α_ξ, G_{h/2}β_η> with α = u∇·ξ - ∇·(uξ) and β the
/// same expression in 1 - u.
std::vector<double> metric_gram(const ScalarField& u, double h, const std::vector<VectorField>& fields);

struct SlopeLowerBound {
  /// √(2 max_c (bᵀc - ½cᵀQc)).
  double value = 0.0;
  /// bᵀc - ½cᵀQc at the computed coefficients.
  double objective = 0.0;
  std::size_t basis_size = 0;
  double ridge = 0.0;
  /// |(Q + ridge I)c - b| / |b|.
  double solve_residual = 0.0;
};

/// Lower bound for the metric slope |∂E_h(u)| over the span of `fields`.
/// A negative ridge selects 1e-8 trace(Q)/size.
SlopeLowerBound slope_lower(const ScalarField& u, double h, const std::vector<VectorField>& fields,
                            double ridge = -1.0);

/// Continuum limits of the two variations on an analytic interface:
/// a = c0 ∫ (∇·ξ - ν·∇ξ ν) ds and b = c0 ∫ (ξ·ν)² ds.
struct ContinuumComparators {
  double a = 0.0;
  double b = 0.0;
};

/// Supports discs and stripes in d = 2; the boundary integrals use the
/// periodic trapezoid rule with `points` nodes per curve.
ContinuumComparators continuum_comparators(const ShapeSpec& shape, const VectorField& xi, int points = 512);

}  // namespace mbotorus
