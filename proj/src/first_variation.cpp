#include "mbotorus/first_variation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "mbotorus/gauss_kernel.hpp"

namespace mbotorus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_dim(int dim, const char* where) {
  if (dim < 1 || dim > 3) throw std::invalid_argument(std::string(where) + ": dimension must be 1..3");
}

double smooth_step_part(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double smooth_step_part_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

constexpr double kCutoffInner = 0.4;
constexpr double kCutoffOuter = 0.5;

/// ψ(ρ) = A/(A+B), A = f(0.5-ρ), B = f(ρ-0.4).
std::pair<double, double> cutoff(double rho) {
  const double a = smooth_step_part(kCutoffOuter - rho);
  const double b = smooth_step_part(rho - kCutoffInner);
  if (b == 0.0) return {1.0, 0.0};
  if (a == 0.0) return {0.0, 0.0};
  const double da = -smooth_step_part_derivative(kCutoffOuter - rho);
  const double db = smooth_step_part_derivative(rho - kCutoffInner);
  const double s = a + b;
  return {a / s, (da * b - a * db) / (s * s)};
}

double wrap_half(double x) { return x - std::floor(x + 0.5); }

Spectrum spectrum_of(const GridSpec& grid, const std::vector<double>& values) {
  return dft(ScalarField(grid, values));
}

}  // namespace

double VectorField::divergence(const Vec3& x) const {
  const auto j = jacobian(x);
  double div = 0.0;
  for (int i = 0; i < dim; ++i) div += j[i][i];
  return div;
}

VectorField constant_field(const Vec3& v, int dim) {
  require_dim(dim, "constant_field");
  VectorField f;
  f.label = "constant";
  f.dim = dim;
  f.value = [v](const Vec3&) { return v; };
  f.jacobian = [](const Vec3&) { return Mat3{}; };
  return f;
}

VectorField dilation_field(const Vec3& center, int dim) {
  require_dim(dim, "dilation_field");
  VectorField f;
  f.label = "dilation";
  f.dim = dim;
  auto offset = [center, dim](const Vec3& x) {
    Vec3 d{};
    for (int a = 0; a < dim; ++a) d[a] = wrap_half(x[a] - center[a]);
    return d;
  };
  f.value = [offset, dim](const Vec3& x) {
    const auto d = offset(x);
    double rho = 0.0;
    for (int a = 0; a < dim; ++a) rho += d[a] * d[a];
    const double psi = cutoff(std::sqrt(rho)).first;
    Vec3 out{};
    for (int a = 0; a < dim; ++a) out[a] = d[a] * psi;
    return out;
  };
  f.jacobian = [offset, dim](const Vec3& x) {
    const auto d = offset(x);
    double rho2 = 0.0;
    for (int a = 0; a < dim; ++a) rho2 += d[a] * d[a];
    const double rho = std::sqrt(rho2);
    const auto [psi, dpsi] = cutoff(rho);
    Mat3 j{};
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        j[a][b] = (a == b ? psi : 0.0) + (rho > 0.0 ? d[a] * d[b] * dpsi / rho : 0.0);
      }
    }
    return j;
  };
  return f;
}

VectorField trig_mode(const std::array<int, 3>& m, int axis, bool sine, int dim) {
  require_dim(dim, "trig_mode");
  if (axis < 0 || axis >= dim) throw std::invalid_argument("trig_mode: axis out of range");
  VectorField f;
  f.label = std::string(sine ? "sin" : "cos") + "(" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," +
            std::to_string(m[2]) + ")e" + std::to_string(axis);
  f.dim = dim;
  auto phase = [m, dim](const Vec3& x) {
    double p = 0.0;
    for (int a = 0; a < dim; ++a) p += m[a] * x[a];
    return kTwoPi * p;
  };
  f.value = [phase, axis, sine](const Vec3& x) {
    Vec3 v{};
    v[axis] = sine ? std::sin(phase(x)) : std::cos(phase(x));
    return v;
  };
  f.jacobian = [phase, axis, sine, m, dim](const Vec3& x) {
    const double p = phase(x);
    const double d = sine ? std::cos(p) : -std::sin(p);
    Mat3 j{};
    for (int b = 0; b < dim; ++b) j[axis][b] = kTwoPi * m[b] * d;
    return j;
  };
  return f;
}

std::vector<VectorField> trig_basis(int dim, int K) {
  require_dim(dim, "trig_basis");
  if (K < 0) throw std::invalid_argument("trig_basis: K must be >= 0");
  std::vector<VectorField> basis;
  const int side = 2 * K + 1;
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= side;
  for (int flat = 0; flat < total; ++flat) {
    std::array<int, 3> m{0, 0, 0};
    int rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      m[a] = rest % side - K;
      rest /= side;
    }
    // Keep m = 0 and the half space whose first nonzero coordinate is positive.
    int lead = 0;
    for (int a = 0; a < dim && lead == 0; ++a) lead = m[a];
    if (lead < 0) continue;
    for (int axis = 0; axis < dim; ++axis) {
      basis.push_back(trig_mode(m, axis, false, dim));
      if (lead > 0) basis.push_back(trig_mode(m, axis, true, dim));
    }
  }
  return basis;
}

VectorField combine(const std::vector<VectorField>& fields, const std::vector<double>& coeffs) {
  if (fields.empty() || fields.size() != coeffs.size()) {
    throw std::invalid_argument("combine: need one coefficient per field");
  }
  VectorField f;
  f.label = "combination";
  f.dim = fields.front().dim;
  f.value = [fields, coeffs](const Vec3& x) {
    Vec3 v{};
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto fj = fields[j].value(x);
      for (int a = 0; a < 3; ++a) v[a] += coeffs[j] * fj[a];
    }
    return v;
  };
  f.jacobian = [fields, coeffs](const Vec3& x) {
    Mat3 m{};
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto jj = fields[j].jacobian(x);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) m[a][b] += coeffs[j] * jj[a][b];
      }
    }
    return m;
  };
  return f;
}

SampledVectorField sample(const VectorField& xi, const GridSpec& grid) {
  if (xi.dim != grid.dim) throw std::invalid_argument("sample: field and grid dimensions differ");
  SampledVectorField s;
  for (auto& c : s.component) c = ScalarField(grid);
  s.divergence = ScalarField(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.center(i);
    const auto v = xi.value(x);
    for (int a = 0; a < grid.dim; ++a) s.component[a][i] = v[a];
    s.divergence[i] = xi.divergence(x);
  }
  return s;
}

std::vector<double> interpolate_at(const ScalarField& f, const std::vector<Vec3>& points) {
  const auto& grid = f.grid();
  const auto spec = dft(f);
  const int n = grid.n;
  const int d = grid.dim;
  std::vector<int> freq(n);
  for (int j = 0; j < n; ++j) freq[j] = frequency_of(j, n);

  std::vector<double> out(points.size());
  std::array<std::vector<Complex>, 3> phase;
  for (auto& p : phase) p.resize(n);
  std::vector<Complex> work(grid.size());
  std::vector<Complex> next(grid.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (int a = 0; a < d; ++a) {
      // Index coordinate: cell j has its center at (j + 1/2)/n.
      const double t = points[p][a] * n - 0.5;
      for (int j = 0; j < n; ++j) {
        phase[a][j] = 2 * freq[j] == n ? Complex(std::cos(std::numbers::pi * t), 0.0)
                                       : std::polar(1.0, kTwoPi * freq[j] * t / n);
      }
    }
    // Contract the last axis first; the flat index has it fastest.
    std::size_t len = grid.size();
    const Complex* src = spec.coeffs().data();
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t rows = len / n;
      Complex* dst = (a % 2 == (d - 1) % 2) ? next.data() : work.data();
      for (std::size_t r = 0; r < rows; ++r) {
        Complex acc = 0.0;
        const Complex* row = src + r * n;
        for (int j = 0; j < n; ++j) acc += row[j] * phase[a][j];
        dst[r] = acc;
      }
      src = dst;
      len = rows;
    }
    out[p] = src[0].real();
  }
  return out;
}

ScalarField transport(const ScalarField& u, const VectorField& xi, double s) {
  const auto& grid = u.grid();
  if (xi.dim != grid.dim) throw std::invalid_argument("transport: field and grid dimensions differ");
  double vmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = xi.value(grid.center(i));
    double norm = 0.0;
    for (int a = 0; a < grid.dim; ++a) norm += v[a] * v[a];
    vmax = std::max(vmax, std::sqrt(norm));
  }
  if (std::abs(s) * vmax > 0.25 * grid.spacing() * (1.0 + 1e-12)) {
    throw std::invalid_argument("transport: step too large (|s| max|ξ| > Δx/4)");
  }
  if (s == 0.0 || vmax == 0.0) return u;

  std::vector<Vec3> feet(grid.size());
  const double tau = 0.5 * s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec3 y = grid.center(i);
    for (int sub = 0; sub < 2; ++sub) {
      const auto v0 = xi.value(y);
      Vec3 mid = y;
      for (int a = 0; a < grid.dim; ++a) mid[a] -= 0.5 * tau * v0[a];
      const auto v1 = xi.value(mid);
      for (int a = 0; a < grid.dim; ++a) y[a] -= tau * v1[a];
    }
    feet[i] = y;
  }
  return ScalarField(grid, interpolate_at(u, feet));
}

double delta_energy(const ScalarField& u, double h, const VectorField& xi) {
  if (!u.in_unit_interval()) throw std::invalid_argument("delta_energy: values must lie in [0,1]");
  const auto& grid = u.grid();
  const HeatMultiplier kernel(grid, h);
  const auto ubar = u.complement();
  const auto ubar_hat = dft(ubar);
  const auto gu = convolve(kernel, dft(u));
  const auto gubar = convolve(kernel, ubar_hat);
  const auto s = sample(xi, grid);

  ScalarField integrand(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    integrand[i] = s.divergence[i] * (ubar[i] * gu[i] + u[i] * gubar[i]);
  }
  for (int a = 0; a < grid.dim; ++a) {
    const auto grad = convolve_gradient(kernel, ubar_hat, a);
    const auto moved = convolve_gradient(kernel, dft(multiply(s.component[a], ubar)), a);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      integrand[i] += u[i] * (s.component[a][i] * grad[i] - moved[i]);
    }
  }
  return integrate(integrand) / std::sqrt(h);
}

std::vector<double> delta_energy_batch(const ScalarField& u, double h, const std::vector<VectorField>& fields) {
  if (!u.in_unit_interval()) throw std::invalid_argument("delta_energy_batch: values must lie in [0,1]");
  const auto& grid = u.grid();
  const HeatMultiplier kernel(grid, h);
  const auto ubar = u.complement();
  const auto u_hat = dft(u);
  const auto ubar_hat = dft(ubar);
  const auto gu = convolve(kernel, u_hat);
  const auto gubar = convolve(kernel, ubar_hat);

  ScalarField p(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) p[i] = ubar[i] * gu[i] + u[i] * gubar[i];
  std::array<ScalarField, 3> w;
  for (int a = 0; a < grid.dim; ++a) {
    const auto grad_ubar = convolve_gradient(kernel, ubar_hat, a);
    const auto grad_u = convolve_gradient(kernel, u_hat, a);
    w[a] = ScalarField(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) w[a][i] = u[i] * grad_ubar[i] + ubar[i] * grad_u[i];
  }

  std::vector<double> out;
  out.reserve(fields.size());
  const double scale = grid.cell_volume() / std::sqrt(h);
  for (const auto& xi : fields) {
    if (xi.dim != grid.dim) throw std::invalid_argument("delta_energy_batch: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = grid.center(i);
      const auto v = xi.value(x);
      double local = xi.divergence(x) * p[i];
      for (int a = 0; a < grid.dim; ++a) local += v[a] * w[a][i];
      sum += local;
    }
    out.push_back(sum * scale);
  }
  return out;
}

double delta_metric_sq(const ScalarField& u, double h, const VectorField& xi) {
  if (!u.in_unit_interval()) throw std::invalid_argument("delta_metric_sq: values must lie in [0,1]");
  const auto& grid = u.grid();
  const int d = grid.dim;
  const HeatMultiplier kernel(grid, h);
  const auto ubar = u.complement();
  const auto s = sample(xi, grid);

  std::array<Spectrum, 3> v_hat;
  for (int a = 0; a < d; ++a) v_hat[a] = dft(multiply(ubar, s.component[a]));
  const auto q_hat = dft(multiply(ubar, s.divergence));

  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  for (int a = 0; a < d; ++a) {
    const auto uxi = multiply(u, s.component[a]);
    for (int b = 0; b < d; ++b) t1 += inner(uxi, convolve_hessian(kernel, v_hat[b], a, b));
    t2 += inner(uxi, convolve_gradient(kernel, q_hat, a));
    t3 += inner(multiply(u, s.divergence), convolve_gradient(kernel, v_hat[a], a));
  }
  const double t4 = inner(multiply(u, s.divergence), convolve(kernel, q_hat));
  return std::sqrt(h) * (t1 - t2 + t3 - t4);
}

std::vector<double> metric_gram(const ScalarField& u, double h, const std::vector<VectorField>& fields) {
  const auto& grid = u.grid();
  const std::size_t cells = grid.size();
  const std::size_t m = fields.size();
  const FrequencyLattice lattice(grid);
  std::vector<double> half_kernel(cells);
  for (std::size_t i = 0; i < cells; ++i) half_kernel[i] = std::exp(-0.25 * h * lattice.norm_sq(i));
  const auto ubar = u.complement();

  // G_{h/2} * (w ∇·ξ - ∇·(wξ)) for w = u and w = 1 - u.
  const double scale = std::sqrt(std::sqrt(h) * grid.cell_volume());
  std::vector<double> buf(cells);
  auto smoothed_flux = [&](const SampledVectorField& s, const ScalarField& w, Eigen::MatrixXd& out, std::size_t j) {
    for (std::size_t i = 0; i < cells; ++i) buf[i] = w[i] * s.divergence[i];
    auto a_hat = spectrum_of(grid, buf);
    for (int axis = 0; axis < grid.dim; ++axis) {
      for (std::size_t i = 0; i < cells; ++i) buf[i] = w[i] * s.component[axis][i];
      const auto flux = spectrum_of(grid, buf);
      for (std::size_t i = 0; i < cells; ++i) {
        const double k = lattice.on_nyquist(i, axis) ? 0.0 : lattice.wavevector(i)[axis];
        a_hat[i] -= Complex(0.0, k) * flux[i];
      }
    }
    for (std::size_t i = 0; i < cells; ++i) a_hat[i] *= half_kernel[i];
    const auto col = idft(a_hat);
    for (std::size_t i = 0; i < cells; ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scale * col[i];
  };

  Eigen::MatrixXd alpha(cells, m);
  Eigen::MatrixXd beta(cells, m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto s = sample(fields[j], grid);
    smoothed_flux(s, u, alpha, j);
    smoothed_flux(s, ubar, beta, j);
  }
  // The four-term form is -√h <α_ξ, G β_η>; Q is twice its symmetric part.
  const Eigen::MatrixXd cross = alpha.transpose() * beta;
  const Eigen::MatrixXd q = -(cross + cross.transpose());
  return {q.data(), q.data() + q.size()};
}

SlopeLowerBound slope_lower(const ScalarField& u, double h, const std::vector<VectorField>& fields, double ridge) {
  if (fields.empty()) throw std::invalid_argument("slope_lower: basis must be nonempty");
  const auto m = static_cast<Eigen::Index>(fields.size());
  const auto bvec = delta_energy_batch(u, h, fields);
  const auto qvec = metric_gram(u, h, fields);
  const Eigen::Map<const Eigen::MatrixXd> q(qvec.data(), m, m);
  const Eigen::Map<const Eigen::VectorXd> b(bvec.data(), m);

  SlopeLowerBound out;
  out.basis_size = fields.size();
  if (ridge < 0.0) {
    // Roundoff level of Q for unit-size fields, 1e-12 · 2√h (π n)².
    const double roundoff = 1e-12 * std::sqrt(h) * 0.5 * std::pow(kTwoPi * u.grid().n, 2);
    ridge = std::max(1e-8 * q.trace() / static_cast<double>(m), roundoff);
  }
  out.ridge = ridge;
  if (b.norm() == 0.0) return out;
  if (q.trace() == 0.0 && out.ridge == 0.0) throw std::runtime_error("slope_lower: singular system");

  Eigen::MatrixXd reg = q;
  reg.diagonal().array() += out.ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::runtime_error("slope_lower: singular system beyond ridge");
  }
  const Eigen::VectorXd c = ldlt.solve(b);
  out.solve_residual = (reg * c - b).norm() / b.norm();
  out.objective = b.dot(c) - 0.5 * c.dot(q * c);
  out.value = std::sqrt(2.0 * std::max(out.objective, 0.0));
  return out;
}

ContinuumComparators continuum_comparators(const ShapeSpec& shape, const VectorField& xi, int points) {
  if (xi.dim != 2) throw std::invalid_argument("continuum_comparators: only d = 2 is supported");
  if (points < 8) throw std::invalid_argument("continuum_comparators: need at least 8 points");
  ContinuumComparators out;
  auto accumulate = [&](const Vec3& x, const Vec3& nu, double weight) {
    const auto v = xi.value(x);
    const auto j = xi.jacobian(x);
    double njn = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) njn += nu[a] * j[a][b] * nu[b];
    }
    const double vn = v[0] * nu[0] + v[1] * nu[1];
    out.a += weight * (j[0][0] + j[1][1] - njn);
    out.b += weight * vn * vn;
  };

  if (const auto* disc = std::get_if<DiscShape>(&shape)) {
    const double ds = kTwoPi * disc->radius / points;
    for (int k = 0; k < points; ++k) {
      const double theta = kTwoPi * k / points;
      const Vec3 nu{std::cos(theta), std::sin(theta), 0.0};
      const Vec3 x{disc->center[0] + disc->radius * nu[0], disc->center[1] + disc->radius * nu[1], 0.0};
      accumulate(x, nu, ds);
    }
  } else if (const auto* stripe = std::get_if<StripeShape>(&shape)) {
    for (int k = 0; k < points; ++k) {
      const double y = static_cast<double>(k) / points;
      accumulate({0.0, y, 0.0}, {-1.0, 0.0, 0.0}, 1.0 / points);
      accumulate({stripe->width, y, 0.0}, {1.0, 0.0, 0.0}, 1.0 / points);
    }
  } else {
    throw std::invalid_argument("continuum_comparators: unsupported shape");
  }
  out.a *= kC0;
  out.b *= kC0;
  return out;
}

}  // namespace mbotorus
