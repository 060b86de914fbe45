#include "mbotorus/gauss_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mbotorus/quadrature.hpp"

namespace mbotorus {

HeatMultiplier::HeatMultiplier(const GridSpec& grid, double h)
    : lattice_(grid), h_(h), values_(grid.size()) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("heat kernel: h must be positive");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = std::exp(-0.5 * h * lattice_.norm_sq(i));
}

HeatMultiplier heat_multiplier(const GridSpec& grid, double h) { return HeatMultiplier(grid, h); }

ScalarField convolve(const HeatMultiplier& kernel, const Spectrum& fhat) {
  if (fhat.grid() != kernel.grid()) throw std::invalid_argument("convolve: grid mismatch");
  Spectrum s = fhat;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= kernel[i];
  return idft(s);
}

ScalarField convolve(const HeatMultiplier& kernel, const ScalarField& f) {
  if (f.grid() != kernel.grid()) throw std::invalid_argument("convolve: grid mismatch");
  if (!f.all_finite()) throw std::invalid_argument("convolve: non-finite input");
  auto out = convolve(kernel, dft(f));
  if (f.in_unit_interval()) {
    constexpr double slack = 1e-12;
    for (auto& v : out.values()) {
      if (v < -slack || v > 1.0 + slack) {
        throw std::runtime_error("convolve: output left [0,1] by more than 1e-12 (" +
                                 std::to_string(v) + "); grid too coarse for h");
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

ScalarField convolve_gradient(const HeatMultiplier& kernel, const Spectrum& fhat, int axis) {
  if (fhat.grid() != kernel.grid()) throw std::invalid_argument("convolve_gradient: grid mismatch");
  const auto& lat = kernel.lattice();
  Spectrum s = fhat;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = lat.on_nyquist(i, axis) ? 0.0 : lat.wavevector(i)[axis];
    s[i] *= Complex(0.0, k * kernel[i]);
  }
  return idft(s);
}

ScalarField convolve_hessian(const HeatMultiplier& kernel, const Spectrum& fhat, int a, int b) {
  if (fhat.grid() != kernel.grid()) throw std::invalid_argument("convolve_hessian: grid mismatch");
  const auto& lat = kernel.lattice();
  Spectrum s = fhat;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = lat.wavevector(i);
    double ka = k[a];
    double kb = k[b];
    if (a != b) {
      if (lat.on_nyquist(i, a)) ka = 0.0;
      if (lat.on_nyquist(i, b)) kb = 0.0;
    }
    s[i] *= -ka * kb * kernel[i];
  }
  return idft(s);
}

ScalarField spectral_derivative(const ScalarField& f, int axis) {
  auto s = dft(f);
  const FrequencyLattice lat(f.grid());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = lat.on_nyquist(i, axis) ? 0.0 : lat.wavevector(i)[axis];
    s[i] *= Complex(0.0, k);
  }
  return idft(s);
}

// ---------------------------------------------------------------------------

namespace {

using Vec = std::array<double, 3>;

double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

double gaussian(const Vec& z, int dim) {
  return std::exp(-0.5 * dot(z, z, dim)) / std::pow(2.0 * std::numbers::pi, 0.5 * dim);
}

/// Orthonormal frame whose first vector is `normal`.
std::array<Vec, 3> frame_from(const Vec& normal, int dim) {
  std::array<Vec, 3> frame{};
  frame[0] = normal;
  int filled = 1;
  for (int c = 0; c < dim && filled < dim; ++c) {
    Vec v{0.0, 0.0, 0.0};
    v[c] = 1.0;
    for (int j = 0; j < filled; ++j) {
      const double p = dot(v, frame[j], dim);
      for (int i = 0; i < dim; ++i) v[i] -= p * frame[j][i];
    }
    const double len = std::sqrt(dot(v, v, dim));
    if (len < 1e-8) continue;
    for (int i = 0; i < dim; ++i) v[i] /= len;
    frame[filled++] = v;
  }
  return frame;
}

/// ∫ G_1(z) g(z) dz over the box [-L,L]^d expressed in the frame of `normal`,
/// splitting the first frame axis at 0. The frame is orthonormal, so G_1
/// factors into one-dimensional weights along the frame axes.
template <class Integrand>
double integrate_aligned(const Vec& normal, int dim, double extent, int points, const Integrand& g) {
  const auto frame = frame_from(normal, dim);
  const int half = std::max(1, points / 2);
  auto neg = gauss_legendre(half, -extent, 0.0);
  const auto pos = gauss_legendre(half, 0.0, extent);
  neg.nodes.insert(neg.nodes.end(), pos.nodes.begin(), pos.nodes.end());
  neg.weights.insert(neg.weights.end(), pos.weights.begin(), pos.weights.end());
  const auto full = gauss_legendre(points, -extent, extent);

  std::array<const QuadratureRule*, 3> rules{&neg, &full, &full};
  std::array<std::vector<double>, 3> weight;
  std::array<std::size_t, 3> counts{1, 1, 1};
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      counts[a] = rules[a]->nodes.size();
      for (std::size_t i = 0; i < counts[a]; ++i) {
        weight[a].push_back(rules[a]->weights[i] * standard_normal_pdf(rules[a]->nodes[i]));
      }
    } else {
      weight[a] = {1.0};
    }
  }
  auto node = [&](int a, std::size_t i) { return a < dim ? rules[a]->nodes[i] : 0.0; };

  double total = 0.0;
  for (std::size_t i0 = 0; i0 < counts[0]; ++i0) {
    const double t0 = node(0, i0);
    for (std::size_t i1 = 0; i1 < counts[1]; ++i1) {
      const double t1 = node(1, i1);
      const double w01 = weight[0][i0] * weight[1][i1];
      double inner = 0.0;
      for (std::size_t i2 = 0; i2 < counts[2]; ++i2) {
        const double t2 = node(2, i2);
        Vec z{0.0, 0.0, 0.0};
        for (int c = 0; c < dim; ++c) z[c] = t0 * frame[0][c] + t1 * frame[1][c] + t2 * frame[2][c];
        inner += weight[2][i2] * g(z);
      }
      total += w01 * inner;
    }
  }
  return total;
}

}  // namespace

double GaussianIdentityReport::max_abs_residual() const noexcept {
  return std::max({std::abs(residual_half_moment), std::abs(residual_linear_map), std::abs(residual_hessian),
                   std::abs(residual_hyperplane)});
}

GaussianIdentityReport gaussian_identity_suite(double extent, int points, const IdentityProbe& probe) {
  const int dim = probe.dim;
  if (dim < 1 || dim > 3) throw std::invalid_argument("identity suite: dimension must be 1..3");
  if (!(extent > 0.0) || points < 2) throw std::invalid_argument("identity suite: bad quadrature spec");

  Vec nu = probe.normal;
  for (int i = dim; i < 3; ++i) nu[i] = 0.0;
  const double nlen = std::sqrt(dot(nu, nu, dim));
  if (nlen == 0.0) throw std::invalid_argument("identity suite: zero normal");
  for (int i = 0; i < dim; ++i) nu[i] /= nlen;
  const auto& A = probe.matrix;
  const Vec& xi = probe.xi;

  GaussianIdentityReport r;
  r.dim = dim;
  r.extent = extent;
  r.points = points;

  Vec e1{1.0, 0.0, 0.0};
  r.value_half_moment = integrate_aligned(e1, dim, extent, points, [&](const Vec& z) { return std::max(z[0], 0.0); });

  r.value_linear_map = integrate_aligned(nu, dim, extent, points, [&](const Vec& z) {
    double z_dot_az = 0.0;  // ∇G_1(z) = -z G_1(z)
    for (int i = 0; i < dim; ++i) {
      double az = 0.0;
      for (int j = 0; j < dim; ++j) az += A[i][j] * z[j];
      z_dot_az += z[i] * az;
    }
    return z_dot_az * std::max(dot(nu, z, dim), 0.0);
  });
  double nu_a_nu = 0.0;
  double trace = 0.0;
  for (int i = 0; i < dim; ++i) {
    trace += A[i][i];
    for (int j = 0; j < dim; ++j) nu_a_nu += nu[i] * A[i][j] * nu[j];
  }
  r.expected_linear_map = kC0 * (nu_a_nu + trace);

  r.value_hessian = integrate_aligned(nu, dim, extent, points, [&](const Vec& z) {
    // ξ·∇²G_1(z)ξ = ((ξ·z)² - |ξ|²) G_1(z)
    const double xz = dot(xi, z, dim);
    return (xz * xz - dot(xi, xi, dim)) * std::max(dot(nu, z, dim), 0.0);
  });
  const double xn = dot(xi, nu, dim);
  r.expected_hessian = kC0 * xn * xn;

  if (dim == 1) {
    r.value_hyperplane = gaussian(Vec{0.0, 0.0, 0.0}, 1);
  } else {
    // Hyperplane ν·z = 0 parameterized by the remaining frame vectors.
    const auto frame = frame_from(nu, dim);
    const auto rule = gauss_legendre(points, -extent, extent);
    const std::size_t m = rule.nodes.size();
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < (dim == 3 ? m : 1); ++j) {
        Vec z{0.0, 0.0, 0.0};
        double w = rule.weights[i];
        for (int c = 0; c < dim; ++c) z[c] += rule.nodes[i] * frame[1][c];
        if (dim == 3) {
          w *= rule.weights[j];
          for (int c = 0; c < dim; ++c) z[c] += rule.nodes[j] * frame[2][c];
        }
        total += w * gaussian(z, dim);
      }
    }
    r.value_hyperplane = total;
  }

  r.residual_half_moment = r.value_half_moment - kC0;
  r.residual_linear_map = r.value_linear_map - r.expected_linear_map;
  r.residual_hessian = r.value_hessian - r.expected_hessian;
  r.residual_hyperplane = r.value_hyperplane - kC0;
  return r;
}

}  // namespace mbotorus
