#include "mbotorus/torus_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "json.hpp"

namespace mbotorus {
namespace {

GridSpec checked_grid(int dim, int n, int min_n) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid: dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n < min_n || !std::has_single_bit(static_cast<unsigned>(n))) {
    throw std::invalid_argument("grid: cells per axis must be a power of two >= " +
                                std::to_string(min_n) + ", got " + std::to_string(n));
  }
  return GridSpec{dim, n};
}

double wrap_unit(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

}  // namespace

std::size_t GridSpec::size() const noexcept {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  return total;
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim); }

std::array<int, 3> GridSpec::index(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridSpec::flat(const std::array<int, 3>& idx) const noexcept {
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) {
    const int i = ((idx[a] % n) + n) % n;
    f = f * n + static_cast<std::size_t>(i);
  }
  return f;
}

std::array<double, 3> GridSpec::center(std::size_t flat) const noexcept {
  const auto idx = index(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = (idx[a] + 0.5) / n;
  return x;
}

GridSpec make_grid(int dim, int n) { return checked_grid(dim, n, 8); }

GridSpec make_small_grid(int dim, int n) { return checked_grid(dim, n, 2); }

// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridSpec grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field: size does not match grid");
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField::is_indicator() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

bool ScalarField::in_unit_interval(double slack) const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [slack](double v) { return v >= -slack && v <= 1.0 + slack; });
}

ScalarField ScalarField::complement() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = 1.0 - values_[i];
  return out;
}

ScalarField ScalarField::shifted(const std::array<int, 3>& offset) const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    auto idx = grid_.index(i);
    for (int a = 0; a < grid_.dim; ++a) idx[a] += offset[a];
    out.values_[grid_.flat(idx)] = values_[i];
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other, "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other, "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "multiply");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
  if (a.grid() != b.grid() || a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return sum * f.grid().cell_volume();
}

// ---------------------------------------------------------------------------

double torus_distance(const std::array<double, 3>& a, const std::array<double, 3>& b, int dim) {
  double sq = 0.0;
  for (int i = 0; i < dim; ++i) {
    double d = std::abs(wrap_unit(a[i]) - wrap_unit(b[i]));
    d = std::min(d, 1.0 - d);
    sq += d * d;
  }
  return std::sqrt(sq);
}

namespace {

struct ShapeSampler {
  const GridSpec& grid;

  ScalarField operator()(const StripeShape& s) const {
    if (!(s.width > 0.0 && s.width < 1.0)) {
      throw std::invalid_argument("stripe: width must lie in (0,1)");
    }
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = grid.center(i)[0] < s.width ? 1.0 : 0.0;
    return out;
  }

  ScalarField operator()(const DiscShape& s) const {
    if (!(s.radius > 0.0 && s.radius < 0.5)) {
      throw std::invalid_argument("disc: radius must lie in (0, 0.5)");
    }
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i] = torus_distance(grid.center(i), s.center, grid.dim) < s.radius ? 1.0 : 0.0;
    }
    return out;
  }

  ScalarField operator()(const DumbbellShape& s) const {
    if (!(s.radius > 0.0 && s.radius < 0.5) || !(s.bar_half_width > 0.0)) {
      throw std::invalid_argument("dumbbell: radius in (0,0.5) and positive bar width required");
    }
    // Bar: segment between the two centers thickened by bar_half_width.
    std::array<double, 3> axis{};
    double len_sq = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      axis[a] = s.right[a] - s.left[a];
      len_sq += axis[a] * axis[a];
    }
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = grid.center(i);
      bool inside = torus_distance(x, s.left, grid.dim) < s.radius ||
                    torus_distance(x, s.right, grid.dim) < s.radius;
      if (!inside && len_sq > 0.0) {
        double t = 0.0;
        for (int a = 0; a < grid.dim; ++a) t += (x[a] - s.left[a]) * axis[a];
        t = std::clamp(t / len_sq, 0.0, 1.0);
        std::array<double, 3> foot{};
        for (int a = 0; a < grid.dim; ++a) foot[a] = s.left[a] + t * axis[a];
        inside = torus_distance(x, foot, grid.dim) < s.bar_half_width;
      }
      out[i] = inside ? 1.0 : 0.0;
    }
    return out;
  }

  ScalarField operator()(const RandomShape& s) const {
    if (!(s.fill >= 0.0 && s.fill <= 1.0)) throw std::invalid_argument("random: fill in [0,1]");
    std::mt19937_64 rng(s.seed);
    std::bernoulli_distribution coin(s.fill);
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = coin(rng) ? 1.0 : 0.0;
    return out;
  }

  ScalarField operator()(const FullShape&) const { return ScalarField(grid, 1.0); }
  ScalarField operator()(const EmptyShape&) const { return ScalarField(grid, 0.0); }
};

}  // namespace

ScalarField sample_shape(const ShapeSpec& shape, const GridSpec& grid) {
  return std::visit(ShapeSampler{grid}, shape);
}

// ---------------------------------------------------------------------------

int frequency_of(int index, int n) noexcept { return index <= n / 2 ? index : index - n; }

FrequencyLattice::FrequencyLattice(const GridSpec& grid) : grid_(grid), k2_(grid.size()) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < k2_.size(); ++i) {
    const auto m = mode(i);
    double sq = 0.0;
    for (int a = 0; a < grid_.dim; ++a) sq += (two_pi * m[a]) * (two_pi * m[a]);
    k2_[i] = sq;
  }
}

std::array<int, 3> FrequencyLattice::mode(std::size_t flat) const noexcept {
  auto idx = grid_.index(flat);
  for (int a = 0; a < grid_.dim; ++a) idx[a] = frequency_of(idx[a], grid_.n);
  return idx;
}

std::array<double, 3> FrequencyLattice::wavevector(std::size_t flat) const noexcept {
  const auto m = mode(flat);
  std::array<double, 3> k{0.0, 0.0, 0.0};
  for (int a = 0; a < grid_.dim; ++a) k[a] = 2.0 * std::numbers::pi * m[a];
  return k;
}

bool FrequencyLattice::on_nyquist(std::size_t flat, int axis) const noexcept {
  return grid_.n % 2 == 0 && grid_.index(flat)[axis] == grid_.n / 2;
}

Spectrum::Spectrum(GridSpec grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw std::invalid_argument("spectrum: size does not match grid");
}

Spectrum dft(const ScalarField& f) {
  std::vector<Complex> data(f.values().begin(), f.values().end());
  detail::fft_inplace(f.grid(), data, detail::Direction::forward);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& c : data) c *= scale;
  return Spectrum(f.grid(), std::move(data));
}

ScalarField idft(const Spectrum& s) {
  std::vector<Complex> data(s.coeffs().begin(), s.coeffs().end());
  detail::fft_inplace(s.grid(), data, detail::Direction::backward);
  ScalarField out(s.grid());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
  return out;
}

ScalarField fourier_shift(const ScalarField& f, const std::array<double, 3>& a) {
  auto spec = dft(f);
  const FrequencyLattice lattice(f.grid());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = lattice.wavevector(i);
    double phase = 0.0;
    for (int ax = 0; ax < f.grid().dim; ++ax) phase -= k[ax] * a[ax];
    spec[i] *= Complex(std::cos(phase), std::sin(phase));
  }
  return idft(spec);
}

// ---------------------------------------------------------------------------

void write_snapshot(const std::filesystem::path& stem, const ScalarField& f,
                    const std::string& name, double time) {
  auto bin = stem;
  bin += ".bin";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot open " + bin.string());
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian");
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));

  nlohmann::json meta{{"d", f.grid().dim}, {"n", f.grid().n}, {"name", name}, {"time", time}};
  auto side = stem;
  side += ".json";
  std::ofstream js(side);
  if (!js) throw std::runtime_error("snapshot: cannot open " + side.string());
  js << meta.dump(2) << '\n';
}

ScalarField read_snapshot(const std::filesystem::path& stem, SnapshotMeta* meta) {
  auto side = stem;
  side += ".json";
  std::ifstream js(side);
  if (!js) throw std::runtime_error("snapshot: cannot open " + side.string());
  const auto j = nlohmann::json::parse(js);
  const auto grid = make_small_grid(j.at("d").get<int>(), j.at("n").get<int>());

  auto bin = stem;
  bin += ".bin";
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + bin.string());
  std::vector<double> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
    throw std::runtime_error("snapshot: truncated raster " + bin.string());
  }
  if (meta != nullptr) {
    *meta = SnapshotMeta{grid.dim, grid.n, j.at("name").get<std::string>(), j.at("time").get<double>()};
  }
  return ScalarField(grid, std::move(values));
}

}  // namespace mbotorus
