#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmsl/bench.hpp"

namespace rmsl {

// Flat run configuration backing the command-line tool.  Field names match
// the JSON keys accepted in --config files one to one.
struct RunConfig {
  // scene
  double roi_l = 2000.0;
  double roi_w = 2000.0;
  int sensors = 90;
  int sources = 3;
  double alpha = 2.5;
  double sigma_db = 4.0;
  double power_low_mw = 2000.0;
  double power_high_mw = 4000.0;
  double min_separation = 100.0;
  // algorithm
  int grid_n = 441;
  int iterations = 7;
  double lambda = 1e-3;
  double sigma_init_db = 6.0;
  double sigma_low_db = 0.5;
  double sigma_high_db = 14.0;
  std::string algorithm = "sdu";
  // benchmark
  int trials = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<double> rmef_d = {0.05, 0.10, 0.15, 0.20};
  // sweep axes
  std::vector<double> sweep_sigma = {2, 4, 6, 8, 10};
  std::vector<int> sweep_sensors = {60, 80, 100, 120, 140};
  std::vector<int> sweep_sources = {2, 3, 4, 5, 6};
  std::vector<int> sweep_iterations = {1, 3, 5, 7, 9, 11, 13, 15};
};

// Raised for anything wrong with user-supplied configuration, as opposed to
// failures during a run.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parses a JSON object and overlays it on `base`.  Unknown keys and
// type-mismatched values raise ConfigError (catches typos early).
RunConfig merge_config_json(const RunConfig& base, const std::string& json_text);
RunConfig load_config_file(const RunConfig& base, const std::string& path);

// throws ConfigError when any field is out of range or inconsistent
void validate_config(const RunConfig& cfg);

// resolved configuration as pretty-printed JSON (the `validate` echo)
std::string config_to_json(const RunConfig& cfg);

ExperimentConfig to_experiment_config(const RunConfig& cfg);

}  // namespace rmsl
