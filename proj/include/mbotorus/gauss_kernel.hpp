#pragma once

#include <array>
#include <vector>

#include "mbotorus/torus_field.hpp"

namespace mbotorus {

/// c0 = 1/sqrt(2π), the one-dimensional standard Gaussian at the origin.
inline constexpr double kC0 = 0.39894228040143267794;

/// Heat kernel G_h (the Gaussian of variance h per axis) on the torus, stored
/// as its Fourier multiplier exp(-h |k|²/2) on the lattice k ∈ 2πZ^d.
/// Multiplying spectra by it is exact periodized convolution.
class HeatMultiplier {
 public:
  HeatMultiplier(const GridSpec& grid, double h);

  [[nodiscard]] const GridSpec& grid() const noexcept { return lattice_.grid(); }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] const FrequencyLattice& lattice() const noexcept { return lattice_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  FrequencyLattice lattice_;
  double h_;
  std::vector<double> values_;
};

HeatMultiplier heat_multiplier(const GridSpec& grid, double h);

/// G_h * f. If f is [0,1]-valued the result is clamped into [0,1] when it
/// strays by at most 1e-12, and rejected beyond that.
ScalarField convolve(const HeatMultiplier& kernel, const ScalarField& f);

/// G_h * f evaluated from a precomputed spectrum (no range handling).
ScalarField convolve(const HeatMultiplier& kernel, const Spectrum& fhat);

/// ∂_axis (G_h * f).
ScalarField convolve_gradient(const HeatMultiplier& kernel, const Spectrum& fhat, int axis);

/// ∂_a ∂_b (G_h * f).
ScalarField convolve_hessian(const HeatMultiplier& kernel, const Spectrum& fhat, int a, int b);

/// Spectral derivative ∂_axis f (Nyquist mode dropped for odd orders).
ScalarField spectral_derivative(const ScalarField& f, int axis);

// ---------------------------------------------------------------------------
// Free-space Gaussian identities checked by quadrature.

struct IdentityProbe {
  int dim = 2;
  std::array<double, 3> normal{0.8, 0.6, 0.0};  // normalized on use
  std::array<std::array<double, 3>, 3> matrix{{{1.0, 0.3, 0.0}, {-0.2, 0.7, 0.0}, {0.0, 0.0, 1.0}}};
  std::array<double, 3> xi{0.4, -1.1, 0.0};
};

struct GaussianIdentityReport {
  int dim = 0;
  double extent = 0.0;
  int points = 0;
  /// ∫ G_1(z) (z_1)_+ dz, expected c0.
  double value_half_moment = 0.0;
  /// -∫ ∇G_1·Az (ν·z)_+ dz, expected c0 (ν·Aν + tr A).
  double value_linear_map = 0.0;
  double expected_linear_map = 0.0;
  /// ∫ ξ·∇²G_1 ξ (ν·z)_+ dz, expected c0 (ξ·ν)².
  double value_hessian = 0.0;
  double expected_hessian = 0.0;
  /// ∫_{ν·z=0} G_1, expected c0.
  double value_hyperplane = 0.0;

  double residual_half_moment = 0.0;
  double residual_linear_map = 0.0;
  double residual_hessian = 0.0;
  double residual_hyperplane = 0.0;

  [[nodiscard]] double max_abs_residual() const noexcept;
};

/// Tensor quadrature over [-extent, extent]^d in a frame aligned with ν,
/// with `points` Gauss–Legendre nodes per axis (split at the kink ν·z = 0).
GaussianIdentityReport gaussian_identity_suite(double extent, int points,
                                               const IdentityProbe& probe = {});

}  // namespace mbotorus
