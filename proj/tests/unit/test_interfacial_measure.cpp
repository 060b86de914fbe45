#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "mbotorus/energy_metric.hpp"
#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/interfacial_measure.hpp"
#include "mbotorus/mbo_scheme.hpp"
#include "mbotorus/quadrature.hpp"
#include "test_fields.hpp"

using namespace mbotorus;

namespace {

constexpr double kPi = std::numbers::pi;

double one(const std::array<double, 3>&) { return 1.0; }

}  // namespace

TEST_CASE("pair measure agrees with an explicit loop over shifted copies") {
  const auto g = make_grid(2, 8);
  const double h = 4e-3;
  const auto u = testing::smooth_phase_field(g, 5, 0.15);
  const ZWeight f = [](const std::array<double, 3>& z) { return 1.0 + z[0] + z[1] * z[1]; };
  const XTest zeta = [](const std::array<double, 3>& x) { return 2.0 + std::sin(2 * kPi * x[0]); };
  const ZQuadrature quad{6.0, 100};

  const auto rule = trapezoid(quad.points, -quad.extent, quad.extent);
  const auto ubar = u.complement();
  double expect = 0.0;
  for (int p = 0; p < quad.points; ++p) {
    for (int q = 0; q < quad.points; ++q) {
      const std::array<double, 3> z{rule.nodes[p], rule.nodes[q], 0.0};
      const double w = rule.weights[p] * rule.weights[q] * standard_normal_pdf(z[0]) * standard_normal_pdf(z[1]);
      const auto moved = fourier_shift(ubar, {std::sqrt(h) * z[0], std::sqrt(h) * z[1], 0.0});
      double inner_sum = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) inner_sum += zeta(g.center(i)) * u[i] * moved[i];
      expect += w * f(z) * inner_sum * g.cell_volume();
    }
  }
  expect /= std::sqrt(h);
  const double got = pair_measure(u, h, f, zeta, PairOrientation::inside_out, quad);
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("pair measure of a full field vanishes and coarse rules are rejected") {
  const auto g = make_grid(2, 16);
  CHECK(pair_measure(ScalarField(g, 1.0), 1e-2, one, one, PairOrientation::inside_out) == 0.0);
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  CHECK_THROWS_AS(pair_measure(stripe, 1e-2, one, one, PairOrientation::inside_out, {5.0, 160}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_measure(stripe, 1e-2, one, one, PairOrientation::inside_out, {6.0, 60}),
                  std::invalid_argument);
}

TEST_CASE("both orientations sum to twice the energy") {
  const double h = 2e-3;
  for (const auto& u : {sample_shape(DiscShape{{0.4, 0.6, 0.0}, 0.25}, make_grid(2, 64)),
                        testing::smooth_phase_field(make_grid(2, 32), 9, 0.1),
                        sample_shape(StripeShape{0.3}, make_grid(1, 256))}) {
    const double a = pair_measure(u, h, one, one, PairOrientation::inside_out);
    const double b = pair_measure(u, h, one, one, PairOrientation::outside_in);
    CHECK(std::abs(a + b - 2.0 * energy(u, h)) < 1e-6);
  }
}

TEST_CASE("flat interfaces carry c0 each") {
  const auto g = make_grid(2, 128);
  const double h = 1e-3;
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  const double inside = pair_measure(stripe, h, one, one, PairOrientation::inside_out);
  CHECK(inside == doctest::Approx(2 * kC0).epsilon(0.02));
  CHECK(pair_measure(stripe, h, one, one, PairOrientation::outside_in) == doctest::Approx(inside).epsilon(1e-12));

  const ZWeight odd = [](const std::array<double, 3>& z) { return z[0]; };
  const double diff = pair_measure(stripe, h, odd, one, PairOrientation::inside_out) -
                      pair_measure(stripe, h, odd, one, PairOrientation::outside_in);
  CHECK(std::abs(diff) < 1e-10);

  const auto line = sample_shape(StripeShape{0.5}, make_grid(1, 512));
  CHECK(pair_measure(line, h, one, one, PairOrientation::inside_out) == doctest::Approx(2 * kC0).epsilon(0.02));
}

TEST_CASE("disc with a quadratic weight matches the boundary integral") {
  const auto g = make_grid(2, 256);
  const double h = 1e-3;
  const double radius = 0.3;
  const auto disc = sample_shape(DiscShape{{0.5, 0.5, 0.0}, radius}, g);
  const ZWeight z1sq = [](const std::array<double, 3>& z) { return z[0] * z[0]; };

  // ∮ ∫ G_1(z) z_1² (ν·z)₊ dz ds by Gauss–Legendre in the normal coordinate
  // and in the tangential coordinate, trapezoid in the angle.
  const auto normal = gauss_legendre(64, 0.0, 10.0);
  const auto tangent = gauss_legendre(64, -10.0, 10.0);
  const int angles = 256;
  double oracle = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double theta = 2 * kPi * k / angles;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double local = 0.0;
    for (std::size_t a = 0; a < normal.nodes.size(); ++a) {
      for (std::size_t b = 0; b < tangent.nodes.size(); ++b) {
        const double sn = normal.nodes[a];
        const double st = tangent.nodes[b];
        const double z1 = sn * c - st * s;
        local += normal.weights[a] * tangent.weights[b] * standard_normal_pdf(sn) * standard_normal_pdf(st) * z1 * z1 * sn;
      }
    }
    oracle += local * radius * 2 * kPi / angles;
  }
  CHECK(oracle == doctest::Approx(3 * kPi * radius * kC0).epsilon(1e-8));
  CHECK(pair_measure(disc, h, z1sq, one, PairOrientation::inside_out) == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("perimeter estimate") {
  const double h = 1e-3;
  const auto g = make_grid(2, 128);
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  CHECK(perimeter_estimate(stripe, h) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(perimeter_estimate(stripe.complement(), h) == doctest::Approx(perimeter_estimate(stripe, h)).epsilon(1e-12));
  CHECK(perimeter_estimate(ScalarField(g, 0.0), h) == 0.0);
  const auto phase = testing::smooth_phase_field(g, 2, 0.05);
  CHECK(perimeter_estimate(phase, h) >= 0.0);

  const auto disc = sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.3}, make_grid(2, 512));
  CHECK(perimeter_estimate(disc, h) == doctest::Approx(2 * kPi * 0.3).epsilon(0.02));
}

TEST_CASE("interface distance") {
  const auto g = make_grid(2, 32);
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  const auto dist = interface_distance(stripe);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.center(i)[0];
    const double expect = std::min({x, std::abs(x - 0.5), 1.0 - x});
    CHECK(dist[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  const auto none = interface_distance(ScalarField(g, 1.0));
  CHECK(none[0] == std::numeric_limits<double>::infinity());
}

TEST_CASE("dissipation density") {
  const auto g = make_grid(2, 256);
  const double h = 1e-3;
  const auto disc = sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.3}, g);
  const auto still = dissipation_density(disc, disc, h);
  CHECK(still.integral == 0.0);
  for (double v : still.density.values()) CHECK(v == 0.0);

  const auto traj = run(disc, h, 0.04);
  // Step where the reference radius √(0.09 - t) passes 0.25.
  const int k = 28;
  const auto step = dissipation_density(traj.states[k], traj.states[k - 1], h);
  CHECK(step.integral == doctest::Approx(metric_sq(traj.states[k], traj.states[k - 1], h) / (2 * h * h)).epsilon(1e-12));
  CHECK(step.integral == doctest::Approx(traj.ledger[k].dissipation).epsilon(1e-10));

  // c0 ∮ V² ds with V = 1/(2R) on the circle of radius R.
  double window = 0.0;
  double comparator = 0.0;
  for (int j = k - 10; j <= k + 10; ++j) {
    window += dissipation_density(traj.states[j], traj.states[j - 1], h).integral;
    comparator += kC0 * kPi / (2.0 * std::sqrt(0.09 - j * h));
  }
  CHECK(window == doctest::Approx(comparator).epsilon(0.15));
  CHECK(step.integral == doctest::Approx(kC0 * kPi / (2.0 * std::sqrt(0.09 - k * h))).epsilon(0.15));

  const auto dist = interface_distance(traj.states[k - 1]);
  CHECK(mass_fraction_within(step.density, dist, 4.0 * std::sqrt(h)) >= 0.9);

  CHECK_THROWS_AS(dissipation_density(disc, testing::uniform_field(g, 1), h), std::invalid_argument);
}
