#include "mbotorus/interfacial_measure.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mbotorus/energy_metric.hpp"
#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/quadrature.hpp"

namespace mbotorus {

double pair_measure(const ScalarField& u, double h, const ZWeight& f, const XTest& zeta,
                    PairOrientation orientation, const ZQuadrature& quad) {
  if (!(h > 0.0)) throw std::invalid_argument("pair_measure: h must be positive");
  if (quad.extent < 6.0 || quad.points < 100) {
    throw std::invalid_argument("pair_measure: quadrature spec too coarse (need extent >= 6 and >= 100 points)");
  }
  if (!u.in_unit_interval()) throw std::invalid_argument("pair_measure: values must lie in [0,1]");

  const auto& grid = u.grid();
  const int d = grid.dim;
  const int n = grid.n;
  const auto ubar = u.complement();
  const bool inside = orientation == PairOrientation::inside_out;
  ScalarField a(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) a[i] = zeta(grid.center(i)) * (inside ? u[i] : ubar[i]);
  const auto a_hat = dft(a);
  const auto b_hat = dft(inside ? ubar : u);

  // ∫ a(x) b(x - y) dx = Re Σ_m conj(â_m) b̂_m exp(-i k_m·y).
  std::vector<Complex> data(grid.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::conj(a_hat[i]) * b_hat[i];

  const auto rule = trapezoid(quad.points, -quad.extent, quad.extent);
  const auto p = static_cast<std::size_t>(quad.points);
  const double sh = std::sqrt(h);
  std::vector<Complex> phase(p * static_cast<std::size_t>(n));
  for (std::size_t q = 0; q < p; ++q) {
    for (int i = 0; i < n; ++i) {
      const double k = 2.0 * std::numbers::pi * frequency_of(i, n);
      phase[q * n + i] = std::polar(1.0, -k * sh * rule.nodes[q]);
    }
  }

  // Contract spectral axes from the last one, leaving node axes in their place.
  std::size_t inner = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    std::size_t outer = 1;
    for (int a2 = 0; a2 < axis; ++a2) outer *= static_cast<std::size_t>(n);
    std::vector<Complex> next(outer * p * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t q = 0; q < p; ++q) {
        Complex* dst = &next[(o * p + q) * inner];
        for (int m = 0; m < n; ++m) {
          const Complex e = phase[q * n + m];
          const Complex* src = &data[(o * n + m) * inner];
          for (std::size_t r = 0; r < inner; ++r) dst[r] += src[r] * e;
        }
      }
    }
    data = std::move(next);
    inner *= p;
  }

  double total = 0.0;
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    std::size_t rest = flat;
    for (int axis = d - 1; axis >= 0; --axis) {
      idx[axis] = rest % p;
      rest /= p;
    }
    std::array<double, 3> z{0.0, 0.0, 0.0};
    double weight = 1.0;
    for (int axis = 0; axis < d; ++axis) {
      z[axis] = rule.nodes[idx[axis]];
      weight *= rule.weights[idx[axis]] * standard_normal_pdf(z[axis]);
    }
    if (weight == 0.0) continue;
    total += weight * f(z) * data[flat].real();
  }
  return total / sh;
}

PairMeasureSample pair_measure_sample(const ScalarField& u, double h, const ZWeight& f, std::string weight_label,
                                      const XTest& zeta, std::string test_label, PairOrientation orientation,
                                      const ZQuadrature& quad) {
  return {std::move(weight_label), std::move(test_label), pair_measure(u, h, f, zeta, orientation, quad), h};
}

double perimeter_estimate(const ScalarField& u, double h) { return energy(u, h) / kC0; }

DissipationDensity dissipation_density(const ScalarField& chi, const ScalarField& chi_prev, double h) {
  require_same_grid(chi, chi_prev, "dissipation_density");
  if (!(h > 0.0)) throw std::invalid_argument("dissipation_density: h must be positive");
  if (!chi.is_indicator() || !chi_prev.is_indicator()) {
    throw std::invalid_argument("dissipation_density: inputs must be indicators");
  }
  const auto smoothed = convolve(HeatMultiplier(chi.grid(), 0.5 * h), dft(chi - chi_prev));
  DissipationDensity out{ScalarField(chi.grid()), 0.0};
  const double scale = 1.0 / (h * std::sqrt(h));
  for (std::size_t i = 0; i < smoothed.size(); ++i) out.density[i] = scale * smoothed[i] * smoothed[i];
  out.integral = integrate(out.density);
  return out;
}

ScalarField interface_distance(const ScalarField& chi) {
  const auto& grid = chi.grid();
  const double half = 0.5 * grid.spacing();
  std::vector<std::array<double, 3>> faces;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.index(i);
    for (int axis = 0; axis < grid.dim; ++axis) {
      auto next = idx;
      next[axis] = (next[axis] + 1) % grid.n;
      if (chi[i] != chi[grid.flat(next)]) {
        auto x = grid.center(i);
        x[axis] += half;
        faces.push_back(x);
      }
    }
  }
  ScalarField dist(grid, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.center(i);
    for (const auto& y : faces) dist[i] = std::min(dist[i], torus_distance(x, y, grid.dim));
  }
  return dist;
}

double mass_fraction_within(const ScalarField& density, const ScalarField& distance, double radius) {
  require_same_grid(density, distance, "mass_fraction_within");
  double near = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    total += density[i];
    if (distance[i] <= radius) near += density[i];
  }
  return total > 0.0 ? near / total : 0.0;
}

}  // namespace mbotorus
