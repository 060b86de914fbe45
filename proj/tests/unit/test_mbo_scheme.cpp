#include <cmath>

#include "doctest.h"
#include "mbotorus/energy_metric.hpp"
#include "mbotorus/mbo_scheme.hpp"
#include "test_fields.hpp"

using namespace mbotorus;

namespace {

bool same_field(const ScalarField& a, const ScalarField& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace

TEST_CASE("threshold step fixes the full torus and a half stripe") {
  const auto g = make_grid(2, 64);
  const HeatMultiplier k(g, 2e-3);
  const auto full = sample_shape(FullShape{}, g);
  CHECK(same_field(threshold_step(full, k), full));
  const auto empty = ScalarField(g);
  CHECK(same_field(threshold_step(empty, k), empty));
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  CHECK(same_field(threshold_step(stripe, k), stripe));
}

TEST_CASE("short intervals vanish in one step, longer ones survive") {
  // The centre of an interval of length L keeps value 2Φ(L/2√h) - 1, which
  // crosses 1/2 at L = 2Φ⁻¹(3/4)√h ≈ 1.349√h.
  const auto g = make_grid(1, 1024);
  const double h = 1e-3;
  const HeatMultiplier k(g, h);
  const double critical = 2.0 * 0.6744897501960817 * std::sqrt(h);
  const auto short_one = threshold_step(sample_shape(StripeShape{0.95 * critical}, g), k);
  CHECK(integrate(short_one) == 0.0);
  const auto long_one = threshold_step(sample_shape(StripeShape{1.08 * critical}, g), k);
  CHECK(integrate(long_one) > 0.0);
}

TEST_CASE("mm_functional agrees with its expanded form") {
  // d²/(2h) + E = (1/√h)[∫u(1 - 2G*χ) + ∫χ G*χ] for any u.
  const auto g = make_grid(2, 32);
  const double h = 4e-3;
  const HeatMultiplier k(g, h);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = testing::uniform_field(g, seed);
    const auto chi = testing::blob_indicator(g, seed + 50, 0.05);
    const auto gchi = convolve(k, chi);
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      lin += u[i] * (1.0 - 2.0 * gchi[i]);
      quad += chi[i] * gchi[i];
    }
    const double expanded = (lin + quad) * g.cell_volume() / std::sqrt(h);
    CHECK(mm_functional(u, chi, h) == doctest::Approx(expanded).epsilon(1e-11));
    CHECK(mm_functional(chi, chi, h) == doctest::Approx(energy(chi, h)).epsilon(1e-13));
    CHECK(mm_functional(threshold_step(chi, k), chi, h) <= mm_functional(chi, chi, h) + 1e-12);
  }
}

TEST_CASE("threshold step minimizes the movement objective on tiny grids") {
  struct Case {
    int dim;
    int n;
  };
  int compared = 0;
  for (const Case c : {Case{1, 2}, Case{1, 4}, Case{1, 8}, Case{1, 16}, Case{2, 2}, Case{2, 4}, Case{3, 2}}) {
    const auto g = make_small_grid(c.dim, c.n);
    for (double h : {0.002, 0.01, 0.05, 0.2}) {
      const HeatMultiplier k(g, h);
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto chi = sample_shape(RandomShape{seed * 31 + static_cast<std::uint64_t>(c.n), 0.5}, g);
        const auto brute = brute_force_step(chi, h);
        const auto step = threshold_step(chi, k);
        CHECK(mm_functional(step, chi, h) == doctest::Approx(brute.objective).epsilon(1e-10));
        if (brute.minimizer_count == 1) CHECK(same_field(step, brute.minimizer));
        ++compared;
      }
    }
  }
  CHECK(compared == 7 * 4 * 6);
  CHECK_THROWS_AS(brute_force_step(ScalarField(make_grid(2, 8)), 0.01), std::invalid_argument);
}

TEST_CASE("thresholding is monotone and translation equivariant") {
  const auto g = make_grid(2, 64);
  const HeatMultiplier k(g, 3e-3);
  const auto inner_disc = sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.15}, g);
  const auto outer = sample_shape(DiscShape{{0.52, 0.5, 0.0}, 0.25}, g);
  const auto a = threshold_step(inner_disc, k);
  const auto b = threshold_step(outer, k);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] <= b[i]);

  const auto blob = testing::blob_indicator(g, 4, 0.05);
  const std::array<int, 3> offset{7, -12, 0};
  CHECK(same_field(threshold_step(blob.shifted(offset), k), threshold_step(blob, k).shifted(offset)));
}

TEST_CASE("a shrinking disc follows R(t)^2 = R0^2 - t") {
  const auto g = make_grid(2, 256);
  const double h = 5e-4;
  const auto traj = run(sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.3}, g), h, 0.04);
  CHECK(traj.warnings.empty());
  for (const auto& e : traj.ledger) {
    if (e.step % 20 != 0) continue;
    const double r = equivalent_radius(e.volume, 2);
    CHECK(r == doctest::Approx(std::sqrt(0.09 - e.time)).epsilon(0.03));
  }
}

TEST_CASE("small discs go extinct and stay empty") {
  const auto g = make_grid(2, 128);
  const double h = 1e-3;
  const auto traj = run(sample_shape(DiscShape{{0.5, 0.5, 0.0}, 0.1}, g), h, 0.02);
  CHECK(traj.ledger.back().volume == 0.0);
  CHECK(traj.ledger.back().energy == 0.0);
  bool emptied = false;
  for (const auto& e : traj.ledger) {
    if (emptied) CHECK(e.volume == 0.0);
    emptied = emptied || e.volume == 0.0;
  }
}

TEST_CASE("run: ledger invariants and validation") {
  const auto g = make_grid(2, 64);
  const double h = 2e-3;
  const auto traj = run(testing::blob_indicator(g, 2, 0.06), h, 0.03);
  CHECK(traj.steps() == 15);
  CHECK(traj.horizon() == doctest::Approx(16 * h));
  CHECK(traj.ledger.size() == traj.states.size());
  const double e0 = traj.ledger.front().energy;
  double dissipated = 0.0;
  for (std::size_t n = 1; n < traj.ledger.size(); ++n) {
    const auto& e = traj.ledger[n];
    CHECK(e.time == doctest::Approx(n * h));
    CHECK(e.energy <= traj.ledger[n - 1].energy + 1e-12);
    CHECK(e.dissipation == doctest::Approx(dissipation_step(traj.states[n], traj.states[n - 1], h)));
    dissipated += h * e.dissipation;
    // Each step dissipates at most the energy it releases.
    CHECK(e.energy + h * e.dissipation <= traj.ledger[n - 1].energy + 1e-10);
  }
  CHECK(dissipated <= e0 + 1e-10);

  CHECK_THROWS_AS(run(ScalarField(g, 0.5), h, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(run(ScalarField(g), 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(run(ScalarField(g), h, 0.0), std::invalid_argument);
  const auto pinned = run(sample_shape(StripeShape{0.5}, g), 1e-4, 1e-3);
  CHECK(pinned.warnings.size() == 1);
}

TEST_CASE("equivalent radius inverts the volume formulas") {
  CHECK(equivalent_radius(0.2, 1) == doctest::Approx(0.1));
  CHECK(equivalent_radius(std::numbers::pi * 0.04, 2) == doctest::Approx(0.2));
  CHECK(equivalent_radius(4.0 / 3.0 * std::numbers::pi * 0.008, 3) == doctest::Approx(0.2));
  CHECK_THROWS_AS(equivalent_radius(0.1, 4), std::invalid_argument);
}
