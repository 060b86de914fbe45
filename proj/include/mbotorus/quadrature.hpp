#pragma once

#include <vector>

namespace mbotorus {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule with `count` nodes on [a, b].
QuadratureRule gauss_legendre(int count, double a, double b);

/// Composite trapezoid with `count` equispaced nodes on [a, b], endpoints included.
QuadratureRule trapezoid(int count, double a, double b);

/// Standard one-dimensional Gaussian density.
double standard_normal_pdf(double x) noexcept;
/// Standard normal CDF Φ.
double standard_normal_cdf(double x) noexcept;

}  // namespace mbotorus
