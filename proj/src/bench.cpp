#include "rmsl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rmsl/random.hpp"

namespace rmsl {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<int> match_sources(const std::vector<Pt>& truth,
                               const std::vector<Pt>& estimates) {
  const int k = static_cast<int>(truth.size());
  if (k == 0 || estimates.size() != truth.size())
    throw std::invalid_argument("match_sources: need equal nonempty sets");
  if (k > 8)
    throw std::invalid_argument("match_sources: too many sources for exhaustive matching");
  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < k; ++i) {
      const double d = distance(truth[i], estimates[perm[i]]);
      cost += d * d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double rrmse(const std::vector<TrialRecord>& records, const Roi& roi) {
  if (!(roi.area() > 0.0))
    throw std::invalid_argument("rrmse: region must have positive area");
  double total = 0.0;
  long count = 0;
  for (const TrialRecord& rec : records) {
    if (rec.failed) continue;
    for (double e2 : rec.sq_errors) {
      total += e2;
      ++count;
    }
  }
  if (count == 0)
    throw std::invalid_argument("rrmse: no successful trials");
  return std::sqrt(total / (roi.area() * static_cast<double>(count)));
}

std::vector<std::pair<double, double>> rmef(
    const std::vector<TrialRecord>& records,
    const std::vector<double>& d_values) {
  long total = 0;
  for (const TrialRecord& rec : records)
    if (!rec.failed) ++total;
  if (total == 0)
    throw std::invalid_argument("rmef: no successful trials");
  std::vector<std::pair<double, double>> out;
  out.reserve(d_values.size());
  for (double d : d_values) {
    long above = 0;
    for (const TrialRecord& rec : records)
      if (!rec.failed && rec.delta > d) ++above;
    out.emplace_back(d, static_cast<double>(above) / total);
  }
  return out;
}

namespace {

TrialRecord run_one_trial(const ExperimentConfig& cfg, int trial) {
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.master_seed, 0, trial);
  const std::uint64_t obs_seed = derive_seed(cfg.master_seed, 1, trial);
  const std::uint64_t algo_seed = derive_seed(cfg.master_seed, 2, trial);
  try {
    Scene scene = generate_scene(cfg.scene, rec.seed);
    for (const Source& s : scene.sources) rec.true_locations.push_back(s.loc);
    Observation obs = simulate_rss(scene, obs_seed);
    SduConfig algo = cfg.algo;
    algo.k_sources = cfg.scene.n_sources;
    const auto t0 = std::chrono::steady_clock::now();
    SduResult res = cfg.algorithm == "sr-ml" ? run_sr_ml(obs, algo, algo_seed)
                                             : run_sdu(obs, algo, algo_seed);
    const auto t1 = std::chrono::steady_clock::now();
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    const std::vector<int> perm =
        match_sources(rec.true_locations, res.locations);
    const double root_area = std::sqrt(cfg.scene.roi.area());
    rec.delta = 0.0;
    for (std::size_t k = 0; k < rec.true_locations.size(); ++k) {
      const Pt& est = res.locations[perm[k]];
      rec.estimated_locations.push_back(est);
      const double err = distance(rec.true_locations[k], est);
      rec.sq_errors.push_back(err * err);
      rec.delta = std::max(rec.delta, err / root_area);
    }
  } catch (const std::exception&) {
    rec.failed = true;
    rec.delta = std::numeric_limits<double>::quiet_NaN();
    rec.estimated_locations.clear();
    rec.sq_errors.clear();
  }
  return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
  if (cfg.n_trials < 1)
    throw std::invalid_argument("run_experiment: need at least one trial");
  if (cfg.algorithm != "sdu" && cfg.algorithm != "sr-ml")
    throw std::invalid_argument("run_experiment: unknown algorithm '" +
                                cfg.algorithm + "'");
  workers = std::max(1, std::min(workers, 64));

  ExperimentResult result;
  result.records.resize(cfg.n_trials);
  if (workers == 1) {
    for (int j = 0; j < cfg.n_trials; ++j)
      result.records[j] = run_one_trial(cfg, j);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int j = next.fetch_add(1);
        if (j >= cfg.n_trials) return;
        result.records[j] = run_one_trial(cfg, j);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const TrialRecord& rec : result.records)
    if (rec.failed) ++result.n_failed;
  if (result.n_failed < cfg.n_trials) {
    result.rrmse = rrmse(result.records, cfg.scene.roi);
    result.rmef = rmef(result.records, cfg.rmef_d);
  } else {
    result.rrmse = std::numeric_limits<double>::quiet_NaN();
    for (double d : cfg.rmef_d)
      result.rmef.emplace_back(d, std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

void write_trial_csv(const std::string& path,
                     const std::vector<TrialRecord>& records, int k_sources) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "trial,seed";
  for (int k = 1; k <= k_sources; ++k)
    out << ",true_u" << k << ",true_v" << k;
  for (int k = 1; k <= k_sources; ++k)
    out << ",est_u" << k << ",est_v" << k;
  out << ",delta,runtime_ms\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const TrialRecord& rec : records) {
    out << rec.trial << ',' << rec.seed;
    for (int k = 0; k < k_sources; ++k) {
      const bool have = k < static_cast<int>(rec.true_locations.size());
      out << ',' << fmt17(have ? rec.true_locations[k].u : nan) << ','
          << fmt17(have ? rec.true_locations[k].v : nan);
    }
    for (int k = 0; k < k_sources; ++k) {
      const bool have = k < static_cast<int>(rec.estimated_locations.size());
      out << ',' << fmt17(have ? rec.estimated_locations[k].u : nan) << ','
          << fmt17(have ? rec.estimated_locations[k].v : nan);
    }
    out << ',' << fmt17(rec.delta) << ',' << fmt17(rec.runtime_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const std::string& path, const std::string& sweep_name,
                       const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << sweep_name << ",rrmse,n_trials,n_failed";
  if (!rows.empty())
    for (const auto& [d, p] : rows.front().rmef) out << ",rmef_" << d;
  out << '\n';
  for (const SummaryRow& row : rows) {
    out << fmt17(row.sweep_value) << ',' << fmt17(row.rrmse) << ','
        << row.n_trials << ',' << row.n_failed;
    for (const auto& [d, p] : row.rmef) out << ',' << fmt17(p);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rmsl
