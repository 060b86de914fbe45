#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mbotorus/energy_metric.hpp"
#include "mbotorus/mbo_scheme.hpp"
#include "test_fields.hpp"

using namespace mbotorus;

namespace {

/// Anisotropic total variation of a raster: Σ_axes Σ |jump| Δx^{d-1}.
double raster_total_variation(const ScalarField& f) {
  const auto& g = f.grid();
  double tv = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = g.index(i);
    for (int a = 0; a < g.dim; ++a) {
      auto next = idx;
      next[a] += 1;
      tv += std::abs(f[g.flat(next)] - f[i]);
    }
  }
  return tv * std::pow(g.spacing(), g.dim - 1);
}

}  // namespace

TEST_CASE("energy of constant fields") {
  const auto g = make_grid(2, 32);
  const double h = 2e-3;
  CHECK(energy(ScalarField(g, 0.0), h) == 0.0);
  CHECK(energy(ScalarField(g, 1.0), h) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(energy(ScalarField(g, 0.5), h) == doctest::Approx(0.25 / std::sqrt(h)).epsilon(1e-13));
  auto bad = ScalarField(g, 0.5);
  bad[3] = 1.5;
  CHECK_THROWS_AS(energy(bad, h), std::invalid_argument);
}

TEST_CASE("flat interfaces carry energy c0 each") {
  // Per interface ∫_0^∞ Φ(-t) dt = 1/√(2π); the half stripe has two.
  const auto g = make_grid(2, 256);
  const double e = energy(sample_shape(StripeShape{0.5}, g), 1e-3);
  CHECK(e == doctest::Approx(2.0 * kC0).epsilon(0.01));
}

TEST_CASE("energy is symmetric under u -> 1-u") {
  const auto g = make_grid(2, 64);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = testing::uniform_field(g, seed);
    CHECK(energy(u, 3e-3) == doctest::Approx(energy(u.complement(), 3e-3)).epsilon(1e-12));
  }
}

TEST_CASE("initial energy is bounded by c0 times the raster perimeter") {
  const auto g = make_grid(2, 256);
  for (const ShapeSpec& shape : {ShapeSpec{DiscShape{{0.5, 0.5, 0.0}, 0.3}}, ShapeSpec{StripeShape{0.5}},
                                 ShapeSpec{DumbbellShape{}}}) {
    const auto chi = sample_shape(shape, g);
    CHECK(energy(chi, 1e-3) <= 1.02 * kC0 * raster_total_variation(chi));
  }
}

TEST_CASE("metric: identity, symmetry, triangle inequality and the real-space path") {
  const auto g = make_grid(2, 64);
  const double h = 2e-3;
  const auto u = testing::uniform_field(g, 1);
  CHECK(metric(u, u, h) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = testing::uniform_field(g, 3 * seed);
    const auto b = testing::uniform_field(g, 3 * seed + 1);
    const auto c = testing::blob_indicator(g, 3 * seed + 2, 0.05);
    CHECK(metric(a, b, h) == doctest::Approx(metric(b, a, h)).epsilon(1e-14));
    CHECK(metric(a, c, h) <= metric(a, b, h) + metric(b, c, h) + 1e-14);
    const double spectral = metric_sq(a, c, h);
    const double real_space = testing::metric_sq_real_space(a, c, h);
    CHECK(std::abs(spectral - real_space) <= 1e-10 * real_space);
  }
  CHECK_THROWS_AS(metric(u, ScalarField(make_grid(2, 32)), h), std::invalid_argument);
}

TEST_CASE("dissipation of a single flipped cell matches its closed-form spectrum") {
  const auto g = make_grid(2, 64);
  const double h = 1e-2;
  const auto chi = sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.2}, g);
  auto flipped = chi;
  const auto cell = g.flat({10, 40, 0});
  flipped[cell] = 1.0 - flipped[cell];
  CHECK(dissipation_step(chi, chi, h) == 0.0);

  // |F(δ)|² = 1/N² at every frequency; the multiplier sum factorizes per axis.
  double axis_sum = 0.0;
  for (int m = -31; m <= 32; ++m) {
    const double k = 2.0 * std::numbers::pi * m;
    axis_sum += std::exp(-0.5 * h * k * k);
  }
  const double cells = static_cast<double>(g.size());
  const double closed = 2.0 * std::sqrt(h) * axis_sum * axis_sum / (cells * cells) / (2.0 * h * h);
  CHECK(dissipation_step(flipped, chi, h) == doctest::Approx(closed).epsilon(1e-12));

  const double real_space = testing::metric_sq_real_space(flipped, chi, h) / (2.0 * h * h);
  CHECK(dissipation_step(flipped, chi, h) == doctest::Approx(real_space).epsilon(1e-10));
}

TEST_CASE("pointwise product bound at a sample point") {
  CHECK(pointwise_product_slack(0.3, 0.8) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(pointwise_product_slack(0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("inequality suite on discs and random fields") {
  const auto g = make_grid(2, 64);
  const double h = 1e-3;
  const auto a = sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.2}, g);
  const auto b = sample_shape(DiscShape{{0.45, 0.5, 0.0}, 0.25}, g);
  const auto report = inequality_suite(a, b, h, 4.0 * h);
  CHECK(report.checks.size() == 6);
  CHECK(report.at("symmetric_difference").slack.value() >= 0.0);
  CHECK(report.at("energy_monotone_in_h").slack.value() >= 0.0);
  CHECK(report.all_hold());

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto chi = testing::blob_indicator(g, seed, 0.04);
    const auto chi2 = testing::blob_indicator(g, seed + 1000, 0.04);
    const auto r = inequality_suite(chi, chi2, 2e-3, 9 * 2e-3);
    CHECK(r.all_hold());
    const auto u = testing::smooth_phase_field(g, seed, 0.03);
    const auto v = testing::uniform_field(g, seed);
    const auto rp = inequality_suite(u, v, 1e-3, 4e-3);
    CHECK(rp.all_hold());
    CHECK(rp.at("symmetric_difference").precondition_violation == "requires indicator fields");
  }
}

TEST_CASE("inequality suite names precondition violations") {
  const auto g = make_grid(2, 32);
  const auto u = testing::uniform_field(g, 1);
  const auto r = inequality_suite(u, u, 1e-3, 3e-3);
  CHECK_FALSE(r.at("energy_monotone_in_h").slack.has_value());
  CHECK(r.at("energy_monotone_in_h").precondition_violation == "h0/h must be a perfect square");
  const auto below = inequality_suite(u, u, 4e-3, 1e-3);
  CHECK_FALSE(below.at("smoothing_defect_l2").slack.has_value());
  CHECK_FALSE(below.at("energy_subadditive").slack.has_value());
  CHECK(below.at("smoothing_defect_l1").slack.has_value());
}

TEST_CASE("time modulus of continuity") {
  const auto g = make_grid(2, 128);
  const double h = 2e-3;
  const auto stripe = run(sample_shape(StripeShape{0.5}, g), h, 0.02);
  for (double s : {0.0, h / 3, h, 0.01}) CHECK(time_modulus(stripe, s, h).integral == 0.0);

  const auto disc = run(sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.25}, g), h, 0.03);
  CHECK(time_modulus(disc, 0.0, h).integral == 0.0);
  const auto at_h = time_modulus(disc, h, h);
  CHECK(at_h.integral > 0.0);
  CHECK(at_h.integral <= at_h.c0_constant * std::sqrt(h));
  for (double s = h / 4; s <= 16 * std::sqrt(h) && s <= disc.horizon(); s *= 1.7) {
    const auto m = time_modulus(disc, s, h);
    CHECK(m.integral <= m.piecewise_bound);
    CHECK(m.piecewise_bound <= m.bound + 1e-15);
  }
  CHECK_THROWS_AS(time_modulus(disc, -1e-3, h), std::invalid_argument);
  CHECK_THROWS_AS(time_modulus(disc, 2.0 * disc.horizon(), h), std::invalid_argument);
}

TEST_CASE("time modulus integral matches a brute-force time quadrature") {
  const auto g = make_grid(2, 32);
  const double h = 5e-3;
  const auto traj = run(sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.2}, g), h, 0.03);
  const double s = 0.37 * h + 2 * h;
  // Midpoint rule on a fine time grid; exact up to the few cells that straddle a jump.
  const int samples = 200000;
  const double T = traj.horizon();
  const double dt = (T - s) / samples;
  double brute = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = s + (i + 0.5) * dt;
    const auto& a = traj.state_at(t);
    const auto& b = traj.state_at(t - s);
    double l1 = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) l1 += std::abs(a[c] - b[c]);
    brute += dt * l1 * g.cell_volume();
  }
  CHECK(time_modulus(traj, s, h).integral == doctest::Approx(brute).epsilon(1e-3));
}
