#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mbotorus/energy_metric.hpp"
#include "mbotorus/first_variation.hpp"
#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/interfacial_measure.hpp"
#include "mbotorus/mbo_scheme.hpp"
#include "mbotorus/variational_interpolation.hpp"

namespace py = pybind11;
using namespace mbotorus;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Array& a) {
  const auto ndim = a.ndim();
  if (ndim < 1 || ndim > 3) throw std::invalid_argument("field arrays must have 1, 2 or 3 axes");
  const auto n = a.shape(0);
  for (py::ssize_t k = 1; k < ndim; ++k) {
    if (a.shape(k) != n) throw std::invalid_argument("field arrays must have the same length on every axis");
  }
  const auto grid = make_small_grid(static_cast<int>(ndim), static_cast<int>(n));
  return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(f.grid().dim), f.grid().n);
  Array out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

PairOrientation orientation_from(const std::string& name) {
  if (name == "inside_out") return PairOrientation::inside_out;
  if (name == "outside_in") return PairOrientation::outside_in;
  throw std::invalid_argument("orientation must be 'inside_out' or 'outside_in'");
}

std::array<double, 3> pad(const std::vector<double>& v) {
  if (v.size() > 3) throw std::invalid_argument("at most three coordinates");
  std::array<double, 3> out{0.0, 0.0, 0.0};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

py::dict run_to_dict(const Trajectory& traj) {
  const auto& g = traj.grid;
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(traj.states.size())};
  shape.insert(shape.end(), static_cast<std::size_t>(g.dim), g.n);
  Array states(shape);
  double* dst = states.mutable_data();
  for (const auto& s : traj.states) dst = std::copy(s.values().begin(), s.values().end(), dst);

  auto column = [&](auto member) {
    std::vector<double> out;
    for (const auto& e : traj.ledger) out.push_back(static_cast<double>(e.*member));
    return Array(static_cast<py::ssize_t>(out.size()), out.data());
  };
  py::dict d;
  d["h"] = traj.h;
  d["states"] = states;
  d["step"] = column(&LedgerEntry::step);
  d["time"] = column(&LedgerEntry::time);
  d["energy"] = column(&LedgerEntry::energy);
  d["metric_increment"] = column(&LedgerEntry::metric_increment);
  d["dissipation"] = column(&LedgerEntry::dissipation);
  d["volume"] = column(&LedgerEntry::volume);
  d["pinning_ratio"] = traj.pinning_ratio;
  d["warnings"] = traj.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thresholding scheme for mean-curvature flow on the periodic unit torus";
  m.attr("c0") = kC0;

  m.def(
      "sample_disc",
      [](int dim, int n, const std::vector<double>& center, double radius) {
        return to_array(sample_shape(DiscShape{pad(center), radius}, make_grid(dim, n)));
      },
      py::arg("dim"), py::arg("n"), py::arg("center") = std::vector<double>{0.5, 0.5, 0.5}, py::arg("radius") = 0.3,
      "Indicator of a disc (d=2), ball (d=3) or interval (d=1) sampled at cell centers.");
  m.def(
      "sample_stripe",
      [](int dim, int n, double width) { return to_array(sample_shape(StripeShape{width}, make_grid(dim, n))); },
      py::arg("dim"), py::arg("n"), py::arg("width") = 0.5, "Indicator of {x_0 < width}.");
  m.def(
      "sample_random",
      [](int dim, int n, std::uint64_t seed, double fill) {
        return to_array(sample_shape(RandomShape{seed, fill}, make_small_grid(dim, n)));
      },
      py::arg("dim"), py::arg("n"), py::arg("seed") = 0, py::arg("fill") = 0.5);

  m.def(
      "energy", [](const Array& u, double h) { return energy(to_field(u), h); }, py::arg("u"), py::arg("h"),
      "E_h(u) = h^{-1/2} ∫ (1-u) G_h*u.");
  m.def(
      "metric", [](const Array& u, const Array& v, double h) { return metric(to_field(u), to_field(v), h); },
      py::arg("u"), py::arg("v"), py::arg("h"));
  m.def(
      "threshold_step",
      [](const Array& chi, double h) {
        const auto f = to_field(chi);
        return to_array(threshold_step(f, HeatMultiplier(f.grid(), h)));
      },
      py::arg("chi"), py::arg("h"));
  m.def(
      "run", [](const Array& chi0, double h, double T) { return run_to_dict(run(to_field(chi0), h, T)); },
      py::arg("chi0"), py::arg("h"), py::arg("T"),
      "Thresholding iterates and their energy ledger as a dict of arrays.");
  m.def("equivalent_radius", &equivalent_radius, py::arg("volume"), py::arg("dim"));

  m.def(
      "interpolate",
      [](const Array& chi_prev, double h, double r, double tol) {
        const auto rec = interpolate(to_field(chi_prev), h, r, InterpolationOptions{tol});
        py::dict d;
        d["u"] = to_array(rec.u);
        d["objective"] = rec.objective;
        d["energy"] = rec.energy;
        d["dist"] = rec.dist;
        d["slope_upper"] = rec.slope_upper;
        d["iterations"] = rec.iterations;
        d["residual"] = rec.residual;
        d["gap"] = rec.gap;
        d["converged"] = rec.converged;
        return d;
      },
      py::arg("chi_prev"), py::arg("h"), py::arg("r"), py::arg("tol") = 1e-8);
  m.def(
      "slope_lower",
      [](const Array& u, double h, int K) {
        const auto f = to_field(u);
        const auto b = slope_lower(f, h, trig_basis(f.grid().dim, K));
        py::dict d;
        d["value"] = b.value;
        d["basis_size"] = b.basis_size;
        d["ridge"] = b.ridge;
        d["solve_residual"] = b.solve_residual;
        return d;
      },
      py::arg("u"), py::arg("h"), py::arg("K") = 4);

  m.def(
      "pair_measure",
      [](const Array& u, double h, const std::string& orientation, const ZWeight& weight, const XTest& test) {
        const ZWeight one = [](const std::array<double, 3>&) { return 1.0; };
        return pair_measure(to_field(u), h, weight ? weight : one, test ? test : one, orientation_from(orientation));
      },
      py::arg("u"), py::arg("h"), py::arg("orientation") = "inside_out", py::arg("weight") = py::none(),
      py::arg("test") = py::none(),
      "Interfacial pair measure with z-weight `weight` and x-test `test` (both default to 1).");
  m.def(
      "perimeter_estimate", [](const Array& u, double h) { return perimeter_estimate(to_field(u), h); },
      py::arg("u"), py::arg("h"));
  m.def(
      "dissipation_density",
      [](const Array& chi, const Array& chi_prev, double h) {
        const auto d = dissipation_density(to_field(chi), to_field(chi_prev), h);
        return py::make_tuple(to_array(d.density), d.integral);
      },
      py::arg("chi"), py::arg("chi_prev"), py::arg("h"));

  m.def(
      "gaussian_identities",
      [](int dim, double extent, int points) {
        IdentityProbe probe;
        probe.dim = dim;
        const auto r = gaussian_identity_suite(extent, points, probe);
        py::dict d;
        d["half_moment"] = r.residual_half_moment;
        d["linear_map"] = r.residual_linear_map;
        d["hessian"] = r.residual_hessian;
        d["hyperplane"] = r.residual_hyperplane;
        d["max_abs_residual"] = r.max_abs_residual();
        return d;
      },
      py::arg("dim") = 2, py::arg("extent") = 8.0, py::arg("points") = 400,
      "Residuals of the Gaussian moment identities by tensor quadrature.");
}
