#include "mbotorus/experiment_cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mbotorus/energy_metric.hpp"
#include "mbotorus/first_variation.hpp"
#include "mbotorus/gauss_kernel.hpp"
#include "mbotorus/interfacial_measure.hpp"
#include "mbotorus/mbo_scheme.hpp"
#include "mbotorus/variational_interpolation.hpp"

namespace mbotorus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kShapeKinds = {"disc", "sphere", "stripe", "dumbbell", "random", "full", "empty"};

bool is_round(const std::string& kind) { return kind == "disc" || kind == "sphere"; }

ReferenceKind reference_kind(const std::string& kind) {
  if (kind == "stripe") return ReferenceKind::stripe;
  return kind == "sphere" ? ReferenceKind::sphere : ReferenceKind::disc;
}

std::string format_int(long long v) { return std::to_string(v); }

std::string format_reference(const ReferenceRadius& r) { return r.extinct ? "extinct" : format_double(r.radius); }

/// Size of the interface in the reference picture: perimeter in d=2, area in d=3, count in d=1.
double reference_interface_size(const RunConfig& cfg, double radius) {
  if (cfg.shape.kind == "stripe" || cfg.d == 1) return 2.0;
  if (cfg.d == 2) return 2.0 * std::numbers::pi * radius;
  return 4.0 * std::numbers::pi * radius * radius;
}

int pick_step(const RunConfig& cfg, int steps) {
  const int step = cfg.step < 0 ? std::max(1, steps / 2) : cfg.step;
  if (step < 1 || step > steps) {
    throw ConfigError("step " + std::to_string(step) + " outside 1.." + std::to_string(steps));
  }
  return step;
}

Trajectory make_trajectory(const RunConfig& cfg) {
  const auto grid = make_grid(cfg.d, cfg.n);
  return run(sample_shape(make_shape(cfg.shape, cfg.seed), grid), cfg.h, cfg.T);
}

void write_config(const fs::path& dir, const RunConfig& cfg, const std::vector<std::string>& warnings) {
  auto j = to_json(cfg);
  j["config_hash"] = config_hash(cfg);
  j["pinning_ratio"] = pinning_ratio(cfg);
  j["warnings"] = warnings;
  std::ofstream out(dir / "config.json");
  out << j.dump(2) << '\n';
}

fs::path prepare(const RunConfig& cfg) {
  validate(cfg);
  const auto dir = resolve_output(cfg);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const RunConfig& cfg) {
  if (cfg.d < 1 || cfg.d > 3) throw ConfigError("d must be 1, 2 or 3");
  if (cfg.n < 8 || (cfg.n & (cfg.n - 1)) != 0) throw ConfigError("n must be a power of two >= 8");
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw ConfigError("h must be positive");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("T must be positive");
  if (cfg.h_list.empty()) throw ConfigError("h list must be nonempty");
  for (double h : cfg.h_list) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h list entries must be positive");
  }
  if (std::find(kShapeKinds.begin(), kShapeKinds.end(), cfg.shape.kind) == kShapeKinds.end()) {
    throw ConfigError("unknown shape '" + cfg.shape.kind + "'");
  }
  if (cfg.shape.kind == "sphere" && cfg.d != 3) throw ConfigError("sphere needs d = 3");
  if (cfg.shape.kind == "disc" && cfg.d != 2) throw ConfigError("disc needs d = 2");
  if (is_round(cfg.shape.kind) && !(cfg.shape.R0 > 0.0 && cfg.shape.R0 < 0.5)) {
    throw ConfigError("R0 must lie in (0, 0.5)");
  }
  if (cfg.shape.kind == "stripe" && !(cfg.shape.width > 0.0 && cfg.shape.width < 1.0)) {
    throw ConfigError("stripe width must lie in (0, 1)");
  }
  if (!(cfg.shape.fill > 0.0 && cfg.shape.fill < 1.0)) throw ConfigError("fill must lie in (0, 1)");
  if (cfg.snapshot_stride < 0) throw ConfigError("snapshot stride must be >= 0");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.nodes < 8) throw ConfigError("nodes must be >= 8");
  if (!(cfg.span > 1.0)) throw ConfigError("span must exceed 1");
  if (cfg.K < 0) throw ConfigError("K must be >= 0");
  if (cfg.step < -1 || cfg.step == 0) throw ConfigError("step must be -1 or >= 1");
  if (cfg.output.empty()) throw ConfigError("output directory must be given");
}

json to_json(const RunConfig& cfg) {
  return json{{"d", cfg.d},
              {"n", cfg.n},
              {"h", cfg.h},
              {"h_list", cfg.h_list},
              {"T", cfg.T},
              {"shape", cfg.shape.kind},
              {"R0", cfg.shape.R0},
              {"width", cfg.shape.width},
              {"center", cfg.shape.center},
              {"fill", cfg.shape.fill},
              {"seed", cfg.seed},
              {"output", cfg.output},
              {"snapshot_stride", cfg.snapshot_stride},
              {"interp", cfg.interp},
              {"slope", cfg.slope},
              {"measures", cfg.measures},
              {"tol", cfg.tol},
              {"nodes", cfg.nodes},
              {"span", cfg.span},
              {"K", cfg.K},
              {"step", cfg.step}};
}

RunConfig config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "d") base.d = value.get<int>();
      else if (key == "n") base.n = value.get<int>();
      else if (key == "h") base.h = value.get<double>();
      else if (key == "h_list") base.h_list = value.get<std::vector<double>>();
      else if (key == "T") base.T = value.get<double>();
      else if (key == "shape") base.shape.kind = value.get<std::string>();
      else if (key == "R0") base.shape.R0 = value.get<double>();
      else if (key == "width") base.shape.width = value.get<double>();
      else if (key == "center") base.shape.center = value.get<std::array<double, 3>>();
      else if (key == "fill") base.shape.fill = value.get<double>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "output") base.output = value.get<std::string>();
      else if (key == "snapshot_stride") base.snapshot_stride = value.get<int>();
      else if (key == "interp") base.interp = value.get<bool>();
      else if (key == "slope") base.slope = value.get<bool>();
      else if (key == "measures") base.measures = value.get<bool>();
      else if (key == "tol") base.tol = value.get<double>();
      else if (key == "nodes") base.nodes = value.get<int>();
      else if (key == "span") base.span = value.get<double>();
      else if (key == "K") base.K = value.get<int>();
      else if (key == "step") base.step = value.get<int>();
      else if (key == "config_hash" || key == "pinning_ratio" || key == "warnings") continue;
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return base;
}

std::string config_hash(const RunConfig& cfg) {
  const auto text = to_json(cfg).dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

double pinning_ratio(const RunConfig& cfg) { return std::sqrt(cfg.h) * cfg.n; }

ShapeSpec make_shape(const ShapeConfig& shape, std::uint64_t seed) {
  if (shape.kind == "disc" || shape.kind == "sphere") return DiscShape{shape.center, shape.R0};
  if (shape.kind == "stripe") return StripeShape{shape.width};
  if (shape.kind == "dumbbell") return DumbbellShape{};
  if (shape.kind == "random") return RandomShape{seed, shape.fill};
  if (shape.kind == "full") return FullShape{};
  if (shape.kind == "empty") return EmptyShape{};
  throw ConfigError("unknown shape '" + shape.kind + "'");
}

ReferenceRadius reference_radius(ReferenceKind kind, double R0, double t, int d) {
  if (!(R0 > 0.0)) throw std::invalid_argument("reference_radius: R0 must be positive");
  if (t < 0.0) throw std::invalid_argument("reference_radius: t must be >= 0");
  if (kind == ReferenceKind::stripe || d == 1) return {R0, false};
  const double sq = R0 * R0 - (d - 1) * t;
  if (sq <= 0.0) return {0.0, true};
  return {std::sqrt(sq), false};
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("csv: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const { return parse_double(rows.at(row).at(column(name))); }

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open " + path.string());
  out << "# config_hash=" << table.config_hash << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.columns);
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::invalid_argument("csv: row width differs from header");
    line(row);
  }
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  CsvTable table;
  std::string text;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    if (text.rfind("# config_hash=", 0) == 0) {
      table.config_hash = text.substr(14);
      continue;
    }
    if (text[0] == '#') continue;
    if (table.columns.empty()) {
      table.columns = split(text);
    } else {
      table.rows.push_back(split(text));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

fs::path resolve_output(const RunConfig& cfg) {
  fs::path out(cfg.output);
  if (out.is_relative()) {
    if (const char* root = std::getenv("MBOTORUS_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
      out = fs::path(root) / out;
    }
  }
  return out;
}

void write_failure_report(const fs::path& dir, const std::string& command, const PipelineResult& result) {
  if (result.failures.empty()) return;
  fs::create_directories(dir);
  std::ofstream out(dir / "failures.json");
  out << json{{"command", command}, {"failures", result.failures}}.dump(2) << '\n';
}

PipelineResult run_command(const RunConfig& cfg) {
  const auto dir = prepare(cfg);
  const auto hash = config_hash(cfg);
  const auto traj = make_trajectory(cfg);
  PipelineResult result;
  result.warnings = traj.warnings;

  CsvTable ledger{{"step", "time", "energy", "metric_increment", "dissipation", "volume", "radius_est", "radius_ref"},
                  {},
                  hash};
  const bool round = is_round(cfg.shape.kind);
  const bool stripe = cfg.shape.kind == "stripe";
  double budget = 0.0;
  double worst_monotone = 0.0;
  for (const auto& e : traj.ledger) {
    std::string est;
    std::string ref;
    if (round) {
      est = format_double(equivalent_radius(e.volume, cfg.d));
      ref = format_reference(reference_radius(reference_kind(cfg.shape.kind), cfg.shape.R0, e.time, cfg.d));
    } else if (stripe) {
      est = format_double(e.volume);
      ref = format_double(cfg.shape.width);
    }
    ledger.rows.push_back({format_int(e.step), format_double(e.time), format_double(e.energy),
                           format_double(e.metric_increment), format_double(e.dissipation), format_double(e.volume),
                           est, ref});
    if (e.step > 0) {
      budget += e.dissipation * cfg.h;
      worst_monotone = std::min(worst_monotone, traj.ledger[e.step - 1].energy - e.energy);
    }
  }
  write_csv(dir / "ledger.csv", ledger);
  result.files.push_back(dir / "ledger.csv");

  if (worst_monotone < -1e-12) {
    result.failures.push_back("energy_nonincreasing: slack " + format_double(worst_monotone));
  }
  const double budget_slack = traj.ledger.front().energy - (traj.ledger.back().energy + budget);
  if (budget_slack < -1e-10) result.failures.push_back("energy_budget: slack " + format_double(budget_slack));

  if (cfg.snapshot_stride > 0) {
    fs::create_directories(dir / "snapshots");
    for (int k = 0; k <= traj.steps(); k += cfg.snapshot_stride) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06d", k);
      write_snapshot(dir / "snapshots" / name, traj.states[k], "chi", k * cfg.h);
    }
  }
  write_config(dir, cfg, result.warnings);
  result.files.push_back(dir / "config.json");

  auto merge = [&](PipelineResult other) {
    result.files.insert(result.files.end(), other.files.begin(), other.files.end());
    result.failures.insert(result.failures.end(), other.failures.begin(), other.failures.end());
  };
  if (cfg.slope) {
    merge(slope_command(cfg));
  } else if (cfg.interp) {
    merge(interp_command(cfg));
  }
  if (cfg.measures) merge(measures_command(cfg));
  return result;
}

namespace {

PipelineResult interpolation_pipeline(const RunConfig& cfg, bool with_slope) {
  const auto dir = prepare(cfg);
  const auto hash = config_hash(cfg);
  const auto traj = make_trajectory(cfg);
  const int step = pick_step(cfg, traj.steps());
  PipelineResult result;
  result.warnings = traj.warnings;

  const auto r_grid = geometric_r_grid(cfg.h, cfg.nodes, cfg.span);
  const auto report = degiorgi_step_check(traj.states[step - 1], traj.states[step], cfg.h, r_grid, {cfg.tol});
  const auto basis = trig_basis(cfg.d, cfg.K);

  CsvTable nodes{{"step", "r", "e", "dist", "slope_upper", "slope_lower", "iters", "residual"}, {}, hash};
  CsvTable slopes{{"r", "slope_lower", "slope_upper", "K", "ridge", "qp_residual", "solve_residual"}, {}, hash};
  for (const auto& rec : report.nodes) {
    std::string lower;
    if (with_slope) {
      const auto bound = slope_lower(rec.u, cfg.h, basis);
      lower = format_double(bound.value);
      slopes.rows.push_back({format_double(rec.r), lower, format_double(rec.slope_upper), format_int(cfg.K),
                             format_double(bound.ridge), format_double(rec.residual),
                             format_double(bound.solve_residual)});
      if (bound.value > rec.slope_upper + 1e-8) {
        result.failures.push_back("slope_sandwich at r=" + format_double(rec.r) + ": lower " + lower + " > upper " +
                                  format_double(rec.slope_upper));
      }
    }
    nodes.rows.push_back({format_int(step), format_double(rec.r), format_double(rec.objective), format_double(rec.dist),
                          format_double(rec.slope_upper), lower, format_int(rec.iterations),
                          format_double(rec.residual)});
  }
  write_csv(dir / "interp.csv", nodes);
  result.files.push_back(dir / "interp.csv");
  if (with_slope) {
    write_csv(dir / "slope.csv", slopes);
    result.files.push_back(dir / "slope.csv");
  }

  CsvTable checks{{"check", "lhs", "rhs", "slack", "allowance"}, {}, hash};
  const double anchor = report.anchor_energy;
  for (const auto& c : report.checks.checks) {
    checks.rows.push_back({c.name, format_double(c.lhs), format_double(c.rhs), format_double(c.slack.value_or(0.0)),
                           format_double(c.allowance)});
    double tolerance = 0.0;
    if (c.name == "integrated_slope") tolerance = -1e-6 * anchor;
    if (c.name == "energy_below_anchor") tolerance = -1e-8;
    if (c.slack && *c.slack < tolerance) {
      result.failures.push_back(c.name + ": slack " + format_double(*c.slack));
    }
  }
  checks.rows.push_back({"trapezoid_slope_integral", format_double(report.nodes.back().objective + report.slope_integral),
                         format_double(anchor), format_double(report.trapezoid_slack), "0"});
  write_csv(dir / "interp_checks.csv", checks);
  result.files.push_back(dir / "interp_checks.csv");
  write_config(dir, cfg, result.warnings);
  return result;
}

}  // namespace

PipelineResult interp_command(const RunConfig& cfg) { return interpolation_pipeline(cfg, cfg.slope); }

PipelineResult slope_command(const RunConfig& cfg) { return interpolation_pipeline(cfg, true); }

PipelineResult measures_command(const RunConfig& cfg) {
  const auto dir = prepare(cfg);
  const auto traj = make_trajectory(cfg);
  const int step = pick_step(cfg, traj.steps());
  PipelineResult result;
  result.warnings = traj.warnings;

  const double h = cfg.h;
  const auto& u = traj.states[step];
  const ZWeight one = [](const std::array<double, 3>&) { return 1.0; };
  const double inside = pair_measure(u, h, one, one, PairOrientation::inside_out);
  const double outside = pair_measure(u, h, one, one, PairOrientation::outside_in);
  const double e = energy(u, h);

  const bool round = is_round(cfg.shape.kind);
  const bool stripe = cfg.shape.kind == "stripe";
  const double t = step * h;
  const auto ref = reference_radius(reference_kind(cfg.shape.kind), cfg.shape.R0, t, cfg.d);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double size = (round && !ref.extinct) || stripe ? reference_interface_size(cfg, ref.radius) : nan;

  // c0 ∮ V² with V = (d-1)/(2R) for round shapes and V = 0 for a stripe.
  double velocity_comparator = nan;
  if (round && !ref.extinct) {
    const double v = (cfg.d - 1) / (2.0 * ref.radius);
    velocity_comparator = kC0 * size * v * v;
  } else if (stripe) {
    velocity_comparator = 0.0;
  }
  const auto dissipation = dissipation_density(u, traj.states[step - 1], h);

  CsvTable table{{"h", "quantity", "estimate", "comparator", "rel_err"}, {}, config_hash(cfg)};
  auto add = [&](const std::string& name, double estimate, double comparator) {
    double err = nan;
    if (std::isfinite(comparator)) {
      err = comparator != 0.0 ? std::abs(estimate - comparator) / std::abs(comparator) : std::abs(estimate);
    }
    table.rows.push_back({format_double(h), name, format_double(estimate), format_double(comparator), format_double(err)});
    return err;
  };
  const double identity_err = add("pair_sum_identity", inside + outside, 2.0 * e);
  add("pair_inside_out", inside, kC0 * size);
  add("pair_outside_in", outside, kC0 * size);
  add("perimeter", perimeter_estimate(u, h), size);
  add("dissipation_rate", dissipation.integral, velocity_comparator);
  if (cfg.d >= 2 && dissipation.integral > 0.0) {
    const auto dist = interface_distance(traj.states[step - 1]);
    add("dissipation_near_interface", mass_fraction_within(dissipation.density, dist, 4.0 * std::sqrt(h)), 1.0);
  }
  write_csv(dir / "measures.csv", table);
  result.files.push_back(dir / "measures.csv");

  if (!(std::abs(inside + outside - 2.0 * e) < 1e-6)) {
    result.failures.push_back("pair_sum_identity: gap " + format_double(identity_err * 2.0 * e));
  }
  write_config(dir, cfg, result.warnings);
  return result;
}

PipelineResult identities_command(const RunConfig& cfg) {
  const auto dir = prepare(cfg);
  const auto report = gaussian_identity_suite(8.0, 400, IdentityProbe{cfg.d >= 2 ? cfg.d : 2});
  PipelineResult result;
  CsvTable table{{"identity", "value", "expected", "residual"}, {}, config_hash(cfg)};
  auto add = [&](const std::string& name, double value, double expected, double residual) {
    table.rows.push_back({name, format_double(value), format_double(expected), format_double(residual)});
    if (!(std::abs(residual) < 1e-6)) result.failures.push_back(name + ": residual " + format_double(residual));
  };
  add("half_moment", report.value_half_moment, kC0, report.residual_half_moment);
  add("linear_map", report.value_linear_map, report.expected_linear_map, report.residual_linear_map);
  add("hessian", report.value_hessian, report.expected_hessian, report.residual_hessian);
  add("hyperplane", report.value_hyperplane, kC0, report.residual_hyperplane);
  write_csv(dir / "identities.csv", table);
  result.files.push_back(dir / "identities.csv");
  return result;
}

PipelineResult converge_command(const RunConfig& cfg) {
  const auto dir = prepare(cfg);
  if (!is_round(cfg.shape.kind)) throw ConfigError("converge needs a disc or sphere");
  PipelineResult result;
  auto hs = cfg.h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());

  CsvTable table{{"h", "n", "final_radius", "ref_radius", "rel_err", "pinning_ratio"}, {}, config_hash(cfg)};
  std::vector<double> errors;
  bool pinned = false;
  for (double h : hs) {
    RunConfig one = cfg;
    one.h = h;
    const auto traj = make_trajectory(one);
    const double t = traj.ledger.back().time;
    const double radius = equivalent_radius(traj.ledger.back().volume, cfg.d);
    const auto ref = reference_radius(reference_kind(cfg.shape.kind), cfg.shape.R0, t, cfg.d);
    const double err = ref.extinct ? radius : std::abs(radius - ref.radius) / ref.radius;
    errors.push_back(err);
    pinned = pinned || traj.pinning_ratio < 4.0;
    for (const auto& w : traj.warnings) result.warnings.push_back("h=" + format_double(h) + ": " + w);
    table.rows.push_back({format_double(h), format_int(cfg.n), format_double(radius), format_reference(ref),
                          format_double(err), format_double(traj.pinning_ratio)});
  }
  write_csv(dir / "converge.csv", table);
  result.files.push_back(dir / "converge.csv");

  bool monotone = true;
  for (std::size_t k = 1; k < errors.size(); ++k) monotone = monotone && errors[k] < errors[k - 1];
  if (!monotone) {
    if (pinned) {
      result.warnings.push_back("radius errors not monotone in h; run is outside the pinning-safe regime");
    } else {
      result.failures.push_back("radius errors not monotone in h");
    }
  }
  write_config(dir, cfg, result.warnings);
  return result;
}

}  // namespace mbotorus
