#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "mbotorus/torus_field.hpp"
#include "test_fields.hpp"

using namespace mbotorus;

TEST_CASE("make_grid validates dimension and resolution") {
  const auto g = make_grid(2, 256);
  CHECK(g.size() == 65536);
  CHECK(g.spacing() == doctest::Approx(1.0 / 256));
  CHECK(make_grid(1, 8).size() == 8);
  CHECK_THROWS_AS(make_grid(2, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, 4), std::invalid_argument);
  CHECK(make_small_grid(2, 4).size() == 16);
  CHECK_THROWS_AS(make_small_grid(2, 6), std::invalid_argument);
}

TEST_CASE("grid indexing round trips and centers are offset by half a cell") {
  const auto g = make_grid(3, 8);
  for (std::size_t i = 0; i < g.size(); i += 37) CHECK(g.flat(g.index(i)) == i);
  const auto c = g.center(g.flat({0, 1, 7}));
  CHECK(c[0] == doctest::Approx(0.5 / 8));
  CHECK(c[1] == doctest::Approx(1.5 / 8));
  CHECK(c[2] == doctest::Approx(7.5 / 8));
}

TEST_CASE("integrate: normalization, exact stripe and naive-sum oracle") {
  const auto g = make_grid(2, 64);
  CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(sample_shape(StripeShape{0.5}, g)) == 0.5);
  const auto f = testing::uniform_field(g, 7);
  CHECK(std::abs(integrate(f) - testing::naive_integral(f)) < 1e-14);
}

TEST_CASE("integrate is linear and monotone") {
  const auto g = make_grid(2, 32);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = testing::uniform_field(g, seed);
    const auto h = testing::uniform_field(g, seed + 100);
    CHECK(integrate(2.0 * f + h) == doctest::Approx(2.0 * integrate(f) + integrate(h)).epsilon(1e-13));
    auto upper = f;
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] = std::max(f[i], h[i]);
    CHECK(integrate(f) <= integrate(upper));
  }
}

TEST_CASE("sample_shape: stripe, full torus and degenerate shapes") {
  const auto g = make_grid(2, 64);
  const auto stripe = sample_shape(StripeShape{0.5}, g);
  CHECK(stripe.is_indicator());
  for (int i = 0; i < 64; ++i) {
    CHECK(stripe[g.flat({i, 3, 0})] == (i < 32 ? 1.0 : 0.0));
  }
  const auto full = sample_shape(FullShape{}, g);
  CHECK(integrate(full) == 1.0);
  CHECK_THROWS_AS(sample_shape(DiscShape{{0.5, 0.5, 0.5}, 0.0}, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_shape(DiscShape{{0.5, 0.5, 0.5}, 0.6}, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_shape(StripeShape{1.2}, g), std::invalid_argument);
}

TEST_CASE("sample_shape: random shapes are seeded and dumbbells are connected blobs") {
  const auto g = make_grid(2, 32);
  const auto a = sample_shape(RandomShape{11, 0.5}, g);
  const auto b = sample_shape(RandomShape{11, 0.5}, g);
  const auto c = sample_shape(RandomShape{12, 0.5}, g);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));

  const auto bell = sample_shape(DumbbellShape{}, make_grid(2, 128));
  const double two_discs = 2.0 * std::numbers::pi * 0.12 * 0.12;
  CHECK(integrate(bell) > two_discs);
  CHECK(integrate(bell) < two_discs + 0.4 * 0.08 + 0.01);
}

TEST_CASE("disc volume approaches the analytic area at rate O(1/n)") {
  const double area = std::numbers::pi * 0.09;
  double prev = 1.0;
  for (int n : {64, 128, 256}) {
    const auto disc = sample_shape(DiscShape{{0.5, 0.5, 0.5}, 0.3}, make_grid(2, n));
    const double err = std::abs(integrate(disc) - area);
    CHECK(err < 2.0 / n);
    CHECK(err <= prev + 1e-15);
    prev = std::max(err, 1e-12);
  }
  // The center need not be grid aligned; periodic wrap keeps the volume.
  const auto wrapped = sample_shape(DiscShape{{0.05, 0.95, 0.0}, 0.3}, make_grid(2, 256));
  CHECK(std::abs(integrate(wrapped) - area) < 2.0 / 256);
}

TEST_CASE("dft: constant field, pure cosine, round trip and Parseval") {
  const auto g = make_grid(2, 32);
  const auto c = dft(ScalarField(g, 0.7));
  CHECK(std::abs(c[0] - Complex(0.7, 0.0)) < 1e-15);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-15);

  ScalarField cosine(g);
  for (std::size_t i = 0; i < g.size(); ++i) cosine[i] = std::cos(2.0 * std::numbers::pi * g.center(i)[0]);
  const auto s = dft(cosine);
  const std::size_t plus = g.flat({1, 0, 0});
  const std::size_t minus = g.flat({31, 0, 0});
  CHECK(std::abs(s[plus]) == doctest::Approx(0.5));
  CHECK(std::abs(s[plus] - std::conj(s[minus])) < 1e-14);
  int nonzero = 0;
  for (std::size_t i = 0; i < s.size(); ++i) nonzero += std::abs(s[i]) > 1e-12 ? 1 : 0;
  CHECK(nonzero == 2);

  for (int n : {8, 64, 512}) {
    const auto grid = make_grid(2, n);
    const auto f = testing::uniform_field(grid, static_cast<std::uint64_t>(n));
    const auto spec = dft(f);
    const auto back = idft(spec);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    CHECK(err < 1e-12);
    double parseval = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) parseval += std::norm(spec[i]);
    CHECK(parseval == doctest::Approx(inner(f, f)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Spectrum(g, std::vector<Complex>(5)), std::invalid_argument);
}

TEST_CASE("fourier_shift reproduces whole-cell shifts and shifts trigonometric fields exactly") {
  const auto g = make_grid(2, 32);
  const auto f = testing::uniform_field(g, 3);
  const auto a = fourier_shift(f, {2.0 / 32, -3.0 / 32, 0.0});
  const auto b = f.shifted({2, -3, 0});
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);

  ScalarField wave(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.center(i);
    wave[i] = std::sin(2.0 * std::numbers::pi * (x[0] + 2.0 * x[1]));
  }
  const auto moved = fourier_shift(wave, {0.013, 0.004, 0.0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.center(i);
    CHECK(std::abs(moved[i] - std::sin(2.0 * std::numbers::pi * (x[0] - 0.013 + 2.0 * (x[1] - 0.004)))) <
          1e-12);
  }
}

TEST_CASE("snapshot files round trip bit-exactly") {
  const auto g = make_grid(3, 8);
  const auto f = testing::uniform_field(g, 5);
  const auto dir = std::filesystem::temp_directory_path() / "mbotorus_snapshot_test";
  std::filesystem::create_directories(dir);
  write_snapshot(dir / "state_0003", f, "chi", 0.003);
  SnapshotMeta meta;
  const auto back = read_snapshot(dir / "state_0003", &meta);
  CHECK(meta.dim == 3);
  CHECK(meta.n == 8);
  CHECK(meta.name == "chi");
  CHECK(meta.time == 0.003);
  CHECK(std::equal(f.values().begin(), f.values().end(), back.values().begin()));
  CHECK(std::filesystem::file_size(dir / "state_0003.bin") == g.size() * sizeof(double));
  std::filesystem::remove_all(dir);
}
