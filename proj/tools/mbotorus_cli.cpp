// mbotorus: thresholding runs, interpolation and slope checks, interfacial
// measures, Gaussian identities and convergence sweeps on the unit torus.
//
// Exit codes: 0 success, 1 invalid input, 2 a numerical check failed.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbotorus/experiment_cli.hpp"

using namespace mbotorus;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    const auto item = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!item.empty()) out.push_back(parse_double(item));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

/// Flags shared by every subcommand; the JSON file is applied first and any
/// flag given on the command line overrides it.
struct Flags {
  std::string config_file;
  std::map<std::string, std::string> given;
};

void add_flags(CLI::App* sub, Flags& flags) {
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--config", flags.config_file, "JSON file with the same keys as the flags")->check(CLI::ExistingFile);
  static const std::vector<std::pair<const char*, const char*>> options = {
      {"d", "dimension, 1 to 3"},
      {"n", "cells per axis, a power of two >= 8"},
      {"h", "time step"},
      {"T", "final time"},
      {"shape", "disc, sphere, stripe, dumbbell, random, full or empty"},
      {"R0", "initial radius of a disc or sphere"},
      {"width", "stripe width"},
      {"fill", "fill fraction of a random field"},
      {"seed", "seed of a random field"},
      {"output", "output directory"},
      {"snapshot_stride", "write a field snapshot every k steps (0: none)"},
      {"tol", "interpolation solver tolerance"},
      {"nodes", "interpolation nodes per step"},
      {"span", "ratio between the largest and smallest node"},
      {"K", "largest frequency of the slope basis"},
      {"step", "step examined by interp, slope and measures (-1: middle)"},
  };
  for (const auto& [key, help] : options) {
    sub->add_option_function<std::string>(
        std::string("--") + key, [&flags, key](const std::string& v) { flags.given[key] = v; }, help);
  }
  sub->add_option_function<std::string>("--h-list", [&flags](const std::string& v) { flags.given["h_list"] = v; },
                                         "comma-separated time steps for converge");
  sub->add_option_function<std::string>("--center", [&flags](const std::string& v) { flags.given["center"] = v; },
                                         "comma-separated shape center");
  for (const auto& [key, help] : std::vector<std::pair<const char*, const char*>>{
           {"interp", "run also writes the interpolation CSVs"},
           {"slope", "run (or interp) also computes slope lower bounds"},
           {"measures", "run also writes the interfacial measures"}}) {
    sub->add_flag_function(
        std::string("--") + key, [&flags, key](std::int64_t) { flags.given[key] = "true"; }, help);
  }
}

RunConfig build_config(const Flags& flags) {
  RunConfig cfg;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed config file: ") + e.what());
    }
    cfg = config_from_json(j, cfg);
  }
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [key, value] : flags.given) {
    try {
      if (key == "shape" || key == "output") {
        overrides[key] = value;
      } else if (key == "interp" || key == "slope" || key == "measures") {
        overrides[key] = true;
      } else if (key == "h_list" || key == "center") {
        overrides[key] = parse_list(value);
      } else if (key == "d" || key == "n" || key == "snapshot_stride" || key == "nodes" || key == "K" || key == "step") {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        overrides[key] = v;
      } else if (key == "seed") {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        overrides[key] = v;
      } else {
        overrides[key] = parse_double(value);
      }
    } catch (const std::exception&) {
      throw ConfigError("bad value for --" + key + ": '" + value + "'");
    }
  }
  if (overrides.contains("center") && overrides["center"].size() != 3) throw ConfigError("--center needs 3 values");
  cfg = config_from_json(overrides, cfg);
  validate(cfg);
  return cfg;
}

void report(const std::string& command, const RunConfig& cfg, const PipelineResult& result) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  if (!result.failures.empty()) {
    write_failure_report(resolve_output(cfg), command, result);
    for (const auto& f : result.failures) std::cerr << "FAILED " << f << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thresholding scheme for mean-curvature flow on the periodic unit torus"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, std::function<PipelineResult(const RunConfig&)>>> commands = {
      {"run", {"Run the scheme and write the energy ledger", run_command}},
      {"interp", {"Variational interpolation on one step", interp_command}},
      {"slope", {"Slope lower and upper bounds along the interpolation", slope_command}},
      {"measures", {"Interfacial pair measures, perimeter and dissipation", measures_command}},
      {"identities", {"Gaussian moment identities by quadrature", identities_command}},
      {"converge", {"Radius error of a shrinking disc or sphere over several h", converge_command}},
  };
  std::map<std::string, Flags> flags;
  for (const auto& [name, entry] : commands) add_flags(app.add_subcommand(name, entry.first), flags[name]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& [name, entry] : commands) {
    if (app.got_subcommand(name)) {
      try {
        const auto cfg = build_config(flags[name]);
        const auto result = entry.second(cfg);
        report(name, cfg, result);
        return result.exit_code();
      } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
      }
    }
  }
  return 1;
}
