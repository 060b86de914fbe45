#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbotorus/torus_field.hpp"

namespace mbotorus {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ShapeConfig {
  /// disc, sphere, stripe, dumbbell, random, full or empty.
  std::string kind = "disc";
  double R0 = 0.3;
  double width = 0.5;
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double fill = 0.5;
};

struct RunConfig {
  int d = 2;
  int n = 256;
  double h = 1e-3;
  /// Time steps swept by `converge`.
  std::vector<double> h_list{4e-3, 2e-3, 1e-3};
  double T = 0.04;
  ShapeConfig shape;
  std::uint64_t seed = 0;
  std::string output = "out";
  /// Write a field snapshot every k steps; 0 disables snapshots.
  int snapshot_stride = 0;
  bool interp = false;
  bool slope = false;
  bool measures = false;
  double tol = 1e-8;
  int nodes = 16;
  double span = 256.0;
  int K = 4;
  /// Step examined by interp/slope/measures; -1 picks the middle of the run.
  int step = -1;
};

/// Throws ConfigError on the first invalid field.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
/// Keys missing from `j` keep the values of `base`; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// √h / Δx.
double pinning_ratio(const RunConfig& cfg);

ShapeSpec make_shape(const ShapeConfig& shape, std::uint64_t seed);

enum class ReferenceKind { disc, sphere, stripe };

struct ReferenceRadius {
  double radius = 0.0;
  /// Set for t at or past R0²/(d-1); `radius` is then 0.
  bool extinct = false;
};

/// √(R0² - (d-1)t) for discs and spheres; stripes keep R0.
ReferenceRadius reference_radius(ReferenceKind kind, double R0, double t, int d);

// ---------------------------------------------------------------------------
// CSV files: a "# config_hash=..." line, a header, then rows. Doubles are
// printed with 17 significant digits so that re-reading is bit-exact.

std::string format_double(double v);
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string config_hash;

  [[nodiscard]] std::size_t column(const std::string& name) const;
  [[nodiscard]] double number(std::size_t row, const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Pipelines behind the subcommands.

/// Output directory: cfg.output, below $MBOTORUS_OUTPUT_ROOT when that is set
/// and cfg.output is relative.
std::filesystem::path resolve_output(const RunConfig& cfg);

struct PipelineResult {
  std::vector<std::filesystem::path> files;
  /// Numerical checks that did not hold, one line each.
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  [[nodiscard]] int exit_code() const noexcept { return failures.empty() ? 0 : 2; }
};

PipelineResult run_command(const RunConfig& cfg);
PipelineResult interp_command(const RunConfig& cfg);
PipelineResult slope_command(const RunConfig& cfg);
PipelineResult measures_command(const RunConfig& cfg);
PipelineResult identities_command(const RunConfig& cfg);
PipelineResult converge_command(const RunConfig& cfg);

/// Writes failures.json next to the CSVs when any check failed.
void write_failure_report(const std::filesystem::path& dir, const std::string& command, const PipelineResult& result);

}  // namespace mbotorus
