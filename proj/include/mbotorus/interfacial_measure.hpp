#pragma once

#include <array>
#include <functional>
#include <string>

#include "mbotorus/torus_field.hpp"

namespace mbotorus {

/// Tensor trapezoid rule on [-extent, extent]^d for the z-integrals.
struct ZQuadrature {
  double extent = 6.0;
  int points = 160;
};

/// Which phase sits at x and which at x - √h z.
enum class PairOrientation {
  /// u(x) (1-u)(x - √h z)
  inside_out,
  /// (1-u)(x) u(x - √h z)
  outside_in,
};

using ZWeight = std::function<double(const std::array<double, 3>&)>;
using XTest = std::function<double(const std::array<double, 3>&)>;

struct PairMeasureSample {
  std::string weight_label;
  std::string test_label;
  double value = 0.0;
  double h = 0.0;
};

/// ∫∫ ζ(x) f(z) G_1(z) h^{-1/2} a(x) b(x - √h z) dx dz, where (a, b) is
/// (u, 1-u) or (1-u, u). Every z-node pairs a with the Fourier shift of b
/// by √h z; all shifts are summed in one pass over the correlation spectrum.
double pair_measure(const ScalarField& u, double h, const ZWeight& f, const XTest& zeta,
                    PairOrientation orientation, const ZQuadrature& quad = {});

PairMeasureSample pair_measure_sample(const ScalarField& u, double h, const ZWeight& f, std::string weight_label,
                                      const XTest& zeta, std::string test_label, PairOrientation orientation,
                                      const ZQuadrature& quad = {});

/// E_h(u) / c0.
double perimeter_estimate(const ScalarField& u, double h);

struct DissipationDensity {
  /// (h√h)^{-1} |G_{h/2} * (χⁿ - χⁿ⁻¹)|².
  ScalarField density;
  /// ∫ density dx = d_h²(χⁿ, χⁿ⁻¹) / (2h²).
  double integral = 0.0;
};

DissipationDensity dissipation_density(const ScalarField& chi, const ScalarField& chi_prev, double h);

/// Periodic distance from every cell center to the nearest face between two
/// cells of different value. Infinite when the indicator has no interface.
ScalarField interface_distance(const ScalarField& chi);

/// Share of ∫density carried by cells with distance <= radius.
double mass_fraction_within(const ScalarField& density, const ScalarField& distance, double radius);

}  // namespace mbotorus
