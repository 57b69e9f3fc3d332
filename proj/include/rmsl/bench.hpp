#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmsl/scene.hpp"
#include "rmsl/sdu.hpp"

namespace rmsl {

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;  // scene seed, lets a single trial be replayed
  std::vector<Pt> true_locations;
  std::vector<Pt> estimated_locations;  // aligned with true_locations
  std::vector<double> sq_errors;        // squared distance per source, m^2
  double delta = 0.0;      // worst per-source error over sqrt(region area)
  double runtime_ms = 0.0;
  bool failed = false;
};

// Assigns estimates to true sources by exhaustive permutation search (K! is
// tiny for the source counts in scope), minimizing total squared distance.
// result[k] is the estimate index paired with true source k.
std::vector<int> match_sources(const std::vector<Pt>& truth,
                               const std::vector<Pt>& estimates);

// sqrt of the mean squared matched error, normalized by the region area:
// sqrt( (1/S) * (1/J) * (1/K) * sum_jk err_jk^2 ).  Failed trials are skipped.
double rrmse(const std::vector<TrialRecord>& records, const Roi& roi);

// Empirical P(delta > d) for each threshold in d_values (failed trials
// skipped); by construction 1 for d < 0 and non-increasing in d.
std::vector<std::pair<double, double>> rmef(
    const std::vector<TrialRecord>& records,
    const std::vector<double>& d_values);

struct ExperimentConfig {
  SceneGenConfig scene;
  SduConfig algo;
  std::string algorithm = "sdu";  // "sdu" or "sr-ml"
  int n_trials = 200;
  std::uint64_t master_seed = 1;
  std::vector<double> rmef_d = {0.05, 0.10, 0.15, 0.20};
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  double rrmse = 0.0;
  std::vector<std::pair<double, double>> rmef;
  int n_failed = 0;
};

// Runs n_trials independent scenes.  Per-trial seeds are derived from
// (master_seed, trial index) alone, and records land in trial order, so the
// output is identical for any worker count.  A trial that throws is recorded
// as failed and excluded from the aggregate metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

// one row per trial: trial, seed, true then estimated coordinates per
// source, delta, runtime_ms (17 significant digits, so reruns compare
// byte-for-byte apart from the runtime column)
void write_trial_csv(const std::string& path,
                     const std::vector<TrialRecord>& records, int k_sources);

struct SummaryRow {
  double sweep_value = 0.0;
  double rrmse = 0.0;
  int n_trials = 0;
  int n_failed = 0;
  std::vector<std::pair<double, double>> rmef;
};

void write_summary_csv(const std::string& path, const std::string& sweep_name,
                       const std::vector<SummaryRow>& rows);

}  // namespace rmsl
