#include "mbotorus/energy_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace mbotorus {

std::size_t Trajectory::index_at(double t) const noexcept {
  if (t <= 0.0 || states.empty()) return 0;
  const auto n = static_cast<std::size_t>(std::floor(t / h));
  return std::min(n, states.size() - 1);
}

double energy(const ScalarField& u, const HeatMultiplier& kernel) {
  if (!u.in_unit_interval()) throw std::invalid_argument("energy: values must lie in [0,1]");
  const auto smoothed = convolve(kernel, dft(u));
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += (1.0 - u[i]) * smoothed[i];
  return sum * u.grid().cell_volume() / std::sqrt(kernel.h());
}

double energy(const ScalarField& u, double h) { return energy(u, heat_multiplier(u.grid(), h)); }

double metric_sq(const ScalarField& u, const ScalarField& v, double h) {
  require_same_grid(u, v, "metric");
  if (!(h > 0.0)) throw std::invalid_argument("metric: h must be positive");
  const auto spec = dft(u - v);
  const FrequencyLattice lattice(u.grid());
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    sum += std::exp(-0.5 * h * lattice.norm_sq(i)) * std::norm(spec[i]);
  }
  return 2.0 * std::sqrt(h) * sum;
}

double metric(const ScalarField& u, const ScalarField& v, double h) {
  return std::sqrt(metric_sq(u, v, h));
}

double dissipation_step(const ScalarField& chi, const ScalarField& chi_prev, double h) {
  return metric_sq(chi, chi_prev, h) / (2.0 * h * h);
}

// ---------------------------------------------------------------------------

const InequalityCheck& InequalityReport::at(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("inequality report: no check named " + name);
}

bool InequalityReport::all_hold(double tolerance) const {
  return std::all_of(checks.begin(), checks.end(), [tolerance](const InequalityCheck& c) {
    return !c.slack || *c.slack >= tolerance;
  });
}

double InequalityReport::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    if (c.slack) m = std::min(m, *c.slack);
  }
  return m;
}

double pointwise_product_slack(double u, double v) noexcept {
  return (1.0 - u) * v + u * (1.0 - v) - std::abs(u - v);
}

namespace {

InequalityCheck make_check(std::string name, double lhs, double rhs) {
  return InequalityCheck{std::move(name), rhs - lhs, lhs, rhs, {}};
}

InequalityCheck skipped(std::string name, std::string why) {
  return InequalityCheck{std::move(name), std::nullopt, 0.0, 0.0, std::move(why)};
}

/// Keep whichever of two evaluations of the same inequality is tighter.
InequalityCheck tighter(InequalityCheck a, InequalityCheck b) {
  if (!a.slack) return b;
  if (!b.slack) return a;
  return *a.slack <= *b.slack ? a : b;
}

double l1_smoothing_defect(const ScalarField& u, const HeatMultiplier& k) {
  const auto s = convolve(k, dft(u));
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += std::abs(u[i] - s[i]);
  return sum * u.grid().cell_volume();
}

double l2_smoothing_defect(const ScalarField& u, const HeatMultiplier& k) {
  const auto s = convolve(k, dft(u));
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += (u[i] - s[i]) * (u[i] - s[i]);
  return sum * u.grid().cell_volume();
}

struct SingleFieldChecks {
  InequalityCheck l1;
  InequalityCheck monotone;
  InequalityCheck subadditive;
  InequalityCheck l2;
};

SingleFieldChecks single_field_checks(const ScalarField& u, double h, double h0) {
  const auto& grid = u.grid();
  const HeatMultiplier kh(grid, h);
  const HeatMultiplier kh0(grid, h0);
  const double eh = energy(u, kh);
  const double eh0 = energy(u, kh0);
  const double sh = std::sqrt(h);
  const double sh0 = std::sqrt(h0);

  SingleFieldChecks out;
  out.l1 = make_check("smoothing_defect_l1", l1_smoothing_defect(u, kh), 2.0 * sh * eh);

  const double ratio = h0 / h;
  const double root = std::round(std::sqrt(ratio));
  if (root >= 1.0 && std::abs(root * root - ratio) <= 1e-9 * ratio) {
    out.monotone = make_check("energy_monotone_in_h", eh0, eh);
  } else {
    out.monotone = skipped("energy_monotone_in_h", "h0/h must be a perfect square");
  }

  if (h0 > h) {
    const double sh1 = sh0 - sh;
    const double e1 = energy(u, HeatMultiplier(grid, sh1 * sh1));
    out.subadditive = make_check("energy_subadditive", sh0 * eh0, sh * eh + sh1 * e1);
  } else {
    out.subadditive = skipped("energy_subadditive", "requires h0 > h");
  }

  if (h0 >= h) {
    out.l2 = make_check("smoothing_defect_l2", l2_smoothing_defect(u, kh0), 4.0 * sh0 * eh);
  } else {
    out.l2 = skipped("smoothing_defect_l2", "requires h0 >= h");
  }
  return out;
}

}  // namespace

InequalityReport inequality_suite(const ScalarField& u, const ScalarField& v, double h, double h0) {
  require_same_grid(u, v, "inequality_suite");
  if (!(h > 0.0) || !(h0 > 0.0)) throw std::invalid_argument("inequality_suite: h, h0 must be positive");
  if (!u.in_unit_interval() || !v.in_unit_interval()) {
    throw std::invalid_argument("inequality_suite: fields must be [0,1]-valued");
  }

  const auto a = single_field_checks(u, h, h0);
  const auto b = single_field_checks(v, h, h0);

  InequalityReport report;
  report.checks.push_back(tighter(a.l1, b.l1));
  report.checks.push_back(tighter(a.monotone, b.monotone));
  report.checks.push_back(tighter(a.subadditive, b.subadditive));
  report.checks.push_back(tighter(a.l2, b.l2));

  if (u.is_indicator() && v.is_indicator()) {
    const HeatMultiplier kh(u.grid(), h);
    double l1 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) l1 += std::abs(u[i] - v[i]);
    l1 *= u.grid().cell_volume();
    const double sh = std::sqrt(h);
    const double rhs = metric_sq(u, v, h) / (2.0 * sh) + 2.0 * sh * (energy(u, kh) + energy(v, kh));
    report.checks.push_back(make_check("symmetric_difference", l1, rhs));
  } else {
    report.checks.push_back(skipped("symmetric_difference", "requires indicator fields"));
  }

  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_at = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = pointwise_product_slack(u[i], v[i]);
    if (s < worst) {
      worst = s;
      worst_at = i;
    }
  }
  const double lhs = std::abs(u[worst_at] - v[worst_at]);
  report.checks.push_back(make_check("pointwise_product_bound", lhs, lhs + worst));
  report.checks.back().slack = worst;
  return report;
}

// ---------------------------------------------------------------------------

TimeModulus time_modulus(const Trajectory& traj, double s, double h) {
  if (traj.states.empty()) throw std::invalid_argument("time_modulus: empty trajectory");
  if (std::abs(h - traj.h) > 1e-12 * traj.h) throw std::invalid_argument("time_modulus: h mismatch");
  const double T = traj.horizon();
  if (!(s >= 0.0 && s <= std::min(1.0, T))) {
    throw std::invalid_argument("time_modulus: shift outside [0, min(1,T)]");
  }

  TimeModulus out;
  out.shift = s;

  // Breakpoints of t -> (χ(t), χ(t-s)) inside (s, T).
  std::vector<double> cuts{s, T};
  const auto steps = traj.states.size();
  for (std::size_t n = 0; n <= steps; ++n) {
    const double a = n * h;
    const double b = n * h + s;
    if (a > s && a < T) cuts.push_back(a);
    if (b > s && b < T) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());

  std::map<std::pair<std::size_t, std::size_t>, double> l1_cache;
  auto l1_between = [&](std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    const auto key = std::minmax(i, j);
    if (auto it = l1_cache.find(key); it != l1_cache.end()) return it->second;
    double sum = 0.0;
    const auto& a = traj.states[i];
    const auto& b = traj.states[j];
    for (std::size_t c = 0; c < a.size(); ++c) sum += std::abs(a[c] - b[c]);
    sum *= traj.grid.cell_volume();
    l1_cache.emplace(key, sum);
    return sum;
  };

  double integral = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double len = cuts[c + 1] - cuts[c];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
    integral += len * l1_between(traj.index_at(mid), traj.index_at(mid - s));
  }
  out.integral = integral;

  const bool have_ledger = traj.ledger.size() == steps;
  std::optional<HeatMultiplier> kernel;
  if (!have_ledger) kernel.emplace(traj.grid, h);
  double dissipation = 0.0;
  double energy_sum = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    if (have_ledger) {
      energy_sum += h * traj.ledger[n].energy;
      if (n >= 1) dissipation += h * traj.ledger[n].dissipation;
    } else {
      energy_sum += h * energy(traj.states[n], *kernel);
      if (n >= 1) dissipation += h * dissipation_step(traj.states[n], traj.states[n - 1], h);
    }
  }
  out.c0_constant = dissipation + 4.0 * energy_sum;

  const double sh = std::sqrt(h);
  out.bound = 4.0 * out.c0_constant * std::sqrt(s);
  if (s <= h) {
    out.piecewise_bound = out.c0_constant * s / sh;
  } else if (s <= sh) {
    out.piecewise_bound = out.c0_constant * 2.0 * sh;
  } else {
    out.piecewise_bound = out.c0_constant * 4.0 * s;
  }
  return out;
}

}  // namespace mbotorus
