#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mbotorus {

using Complex = std::complex<double>;

/// Uniform periodic raster on the unit torus [0,1)^d, cell-centered.
///
/// Cell i along an axis has its center at (i + 1/2) / n. Flat index is
/// row-major with the last axis fastest: idx = ((i0 * n) + i1) * n + i2.
struct GridSpec {
  int dim = 2;
  int n = 8;

  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] double spacing() const noexcept { return 1.0 / n; }
  /// Δx^d, the quadrature weight of a single cell.
  [[nodiscard]] double cell_volume() const noexcept;
  [[nodiscard]] std::array<int, 3> index(std::size_t flat) const noexcept;
  [[nodiscard]] std::size_t flat(const std::array<int, 3>& idx) const noexcept;
  [[nodiscard]] std::array<double, 3> center(std::size_t flat) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Grid for production runs: d in {1,2,3}, n a power of two, n >= 8.
GridSpec make_grid(int dim, int n);

/// Same as make_grid but accepts n >= 2; only meant for exhaustive toy problems.
GridSpec make_small_grid(int dim, int n);

/// Real values on a GridSpec. Indicator fields hold {0,1}, phase fields [0,1].
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid, double value = 0.0);
  ScalarField(GridSpec grid, std::vector<double> values);

  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  [[nodiscard]] bool all_finite() const noexcept;
  [[nodiscard]] bool is_indicator() const noexcept;
  [[nodiscard]] bool in_unit_interval(double slack = 0.0) const noexcept;

  /// Pointwise 1 - f.
  [[nodiscard]] ScalarField complement() const;
  /// Periodic shift by whole cells: result(x) = f(x - offset * Δx).
  [[nodiscard]] ScalarField shifted(const std::array<int, 3>& offset) const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

/// Pointwise product.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

/// Cell-average quadrature Δx^d Σ f.
double integrate(const ScalarField& f);

/// ∫ f g dx by the same quadrature.
double inner(const ScalarField& f, const ScalarField& g);

// ---------------------------------------------------------------------------
// Shape library

struct StripeShape {
  double width = 0.5;  // {x_1 < width}
};
struct DiscShape {
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double radius = 0.3;
};
struct DumbbellShape {
  std::array<double, 3> left{0.3, 0.5, 0.5};
  std::array<double, 3> right{0.7, 0.5, 0.5};
  double radius = 0.12;
  double bar_half_width = 0.04;
};
struct RandomShape {
  std::uint64_t seed = 0;
  double fill = 0.5;
};
struct FullShape {};
struct EmptyShape {};

using ShapeSpec =
    std::variant<StripeShape, DiscShape, DumbbellShape, RandomShape, FullShape, EmptyShape>;

/// Periodic (minimum-image) distance between two points of the torus.
double torus_distance(const std::array<double, 3>& a, const std::array<double, 3>& b, int dim);

/// Indicator equal to 1 at cell centers inside the shape.
ScalarField sample_shape(const ShapeSpec& shape, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Fourier transforms
//
// Normalization: F(m) = (1/N) Σ_j f_j exp(-2πi m·x_j) with x_j = j/n (the
// cell offset is a common phase and is dropped). Thus F(0) is the mean of f,
// and Parseval reads ∫|f|² dx = Σ_m |F(m)|² with the cell-average quadrature.

/// Per-axis integer frequency of a transform index: m in (-n/2, n/2].
int frequency_of(int index, int n) noexcept;

/// Lattice frequency vectors k = 2π m, one per spectral index.
class FrequencyLattice {
 public:
  explicit FrequencyLattice(const GridSpec& grid);
  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] std::array<int, 3> mode(std::size_t flat) const noexcept;
  [[nodiscard]] std::array<double, 3> wavevector(std::size_t flat) const noexcept;
  [[nodiscard]] double norm_sq(std::size_t flat) const noexcept { return k2_[flat]; }
  /// True if any axis sits on the Nyquist frequency n/2.
  [[nodiscard]] bool on_nyquist(std::size_t flat, int axis) const noexcept;

 private:
  GridSpec grid_;
  std::vector<double> k2_;
};

class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(GridSpec grid, std::vector<Complex> coeffs);
  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
  [[nodiscard]] std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::span<Complex> coeffs() noexcept { return coeffs_; }
  [[nodiscard]] Complex operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }

 private:
  GridSpec grid_{};
  std::vector<Complex> coeffs_;
};

Spectrum dft(const ScalarField& f);
/// Inverse transform; the imaginary part is discarded.
ScalarField idft(const Spectrum& s);

/// Periodic shift by an arbitrary displacement: result(x) = f(x - a), using
/// the trigonometric interpolant of f.
ScalarField fourier_shift(const ScalarField& f, const std::array<double, 3>& a);

// ---------------------------------------------------------------------------
// Snapshot files: raw little-endian float64 raster plus a JSON sidecar.

struct SnapshotMeta {
  int dim = 0;
  int n = 0;
  std::string name;
  double time = 0.0;
};

/// Writes `<stem>.bin` and `<stem>.json`.
void write_snapshot(const std::filesystem::path& stem, const ScalarField& f,
                    const std::string& name, double time);
ScalarField read_snapshot(const std::filesystem::path& stem, SnapshotMeta* meta = nullptr);

}  // namespace mbotorus
