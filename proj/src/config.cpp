#include "rmsl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rmsl {

namespace {

using nlohmann::json;

template <typename T>
void take(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for key '") + key + "'");
  }
}

}  // namespace

RunConfig merge_config_json(const RunConfig& base,
                            const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const char* known[] = {
      "roi_l", "roi_w", "sensors", "sources", "alpha", "sigma_db",
      "power_low_mw", "power_high_mw", "min_separation", "grid_n",
      "iterations", "lambda", "sigma_init_db", "sigma_low_db",
      "sigma_high_db", "algorithm", "trials", "seed", "workers", "rmef_d",
      "sweep_sigma", "sweep_sensors", "sweep_sources", "sweep_iterations"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
  }

  RunConfig cfg = base;
  take(j, "roi_l", cfg.roi_l);
  take(j, "roi_w", cfg.roi_w);
  take(j, "sensors", cfg.sensors);
  take(j, "sources", cfg.sources);
  take(j, "alpha", cfg.alpha);
  take(j, "sigma_db", cfg.sigma_db);
  take(j, "power_low_mw", cfg.power_low_mw);
  take(j, "power_high_mw", cfg.power_high_mw);
  take(j, "min_separation", cfg.min_separation);
  take(j, "grid_n", cfg.grid_n);
  take(j, "iterations", cfg.iterations);
  take(j, "lambda", cfg.lambda);
  take(j, "sigma_init_db", cfg.sigma_init_db);
  take(j, "sigma_low_db", cfg.sigma_low_db);
  take(j, "sigma_high_db", cfg.sigma_high_db);
  take(j, "algorithm", cfg.algorithm);
  take(j, "trials", cfg.trials);
  take(j, "seed", cfg.seed);
  take(j, "workers", cfg.workers);
  take(j, "rmef_d", cfg.rmef_d);
  take(j, "sweep_sigma", cfg.sweep_sigma);
  take(j, "sweep_sensors", cfg.sweep_sensors);
  take(j, "sweep_sources", cfg.sweep_sources);
  take(j, "sweep_iterations", cfg.sweep_iterations);
  return cfg;
}

RunConfig load_config_file(const RunConfig& base, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return merge_config_json(base, buf.str());
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (!(cfg.roi_l > 0.0) || !(cfg.roi_w > 0.0))
    fail("region dimensions must be positive");
  if (cfg.sensors < 1) fail("sensors must be >= 1");
  if (cfg.sources < 1) fail("sources must be >= 1");
  if (cfg.sources > 8) fail("sources must be <= 8 (exhaustive matching)");
  if (!(cfg.alpha > 0.0)) fail("alpha must be positive");
  if (cfg.sigma_db < 0.0) fail("sigma_db must be nonnegative");
  if (!(cfg.power_low_mw > 0.0) || cfg.power_high_mw < cfg.power_low_mw)
    fail("power range must satisfy 0 < low <= high");
  if (cfg.min_separation < 0.0) fail("min_separation must be nonnegative");
  const int side = static_cast<int>(std::lround(std::sqrt(double(cfg.grid_n))));
  if (cfg.grid_n < 4 || side * side != cfg.grid_n)
    fail("grid_n must be a perfect square >= 4");
  if (cfg.iterations < 1) fail("iterations must be >= 1");
  if (cfg.lambda < 0.0) fail("lambda must be nonnegative");
  if (!(cfg.sigma_low_db > 0.0) || cfg.sigma_high_db < cfg.sigma_low_db)
    fail("sigma bounds must satisfy 0 < low <= high");
  if (cfg.sigma_init_db < cfg.sigma_low_db ||
      cfg.sigma_init_db > cfg.sigma_high_db)
    fail("sigma_init_db must lie within the sigma bounds");
  if (cfg.algorithm != "sdu" && cfg.algorithm != "sr-ml")
    fail("algorithm must be 'sdu' or 'sr-ml'");
  if (cfg.trials < 1) fail("trials must be >= 1");
  if (cfg.workers < 1 || cfg.workers > 64) fail("workers must be in [1,64]");
  for (double d : cfg.rmef_d)
    if (!std::isfinite(d)) fail("rmef_d entries must be finite");
  if (cfg.sweep_sigma.empty() || cfg.sweep_sensors.empty() ||
      cfg.sweep_sources.empty() || cfg.sweep_iterations.empty())
    fail("sweep lists must be nonempty");
  for (double s : cfg.sweep_sigma)
    if (s < 0.0) fail("sweep_sigma entries must be nonnegative");
  for (int m : cfg.sweep_sensors)
    if (m < 1) fail("sweep_sensors entries must be >= 1");
  for (int k : cfg.sweep_sources)
    if (k < 1 || k > 8) fail("sweep_sources entries must be in [1,8]");
  for (int i : cfg.sweep_iterations)
    if (i < 1) fail("sweep_iterations entries must be >= 1");
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["roi_l"] = cfg.roi_l;
  j["roi_w"] = cfg.roi_w;
  j["sensors"] = cfg.sensors;
  j["sources"] = cfg.sources;
  j["alpha"] = cfg.alpha;
  j["sigma_db"] = cfg.sigma_db;
  j["power_low_mw"] = cfg.power_low_mw;
  j["power_high_mw"] = cfg.power_high_mw;
  j["min_separation"] = cfg.min_separation;
  j["grid_n"] = cfg.grid_n;
  j["iterations"] = cfg.iterations;
  j["lambda"] = cfg.lambda;
  j["sigma_init_db"] = cfg.sigma_init_db;
  j["sigma_low_db"] = cfg.sigma_low_db;
  j["sigma_high_db"] = cfg.sigma_high_db;
  j["algorithm"] = cfg.algorithm;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["rmef_d"] = cfg.rmef_d;
  j["sweep_sigma"] = cfg.sweep_sigma;
  j["sweep_sensors"] = cfg.sweep_sensors;
  j["sweep_sources"] = cfg.sweep_sources;
  j["sweep_iterations"] = cfg.sweep_iterations;
  return j.dump(2);
}

ExperimentConfig to_experiment_config(const RunConfig& cfg) {
  ExperimentConfig exp;
  exp.scene.roi = {cfg.roi_l, cfg.roi_w};
  exp.scene.n_sensors = cfg.sensors;
  exp.scene.n_sources = cfg.sources;
  exp.scene.alpha = cfg.alpha;
  exp.scene.sigma_db = cfg.sigma_db;
  exp.scene.power_low_mw = cfg.power_low_mw;
  exp.scene.power_high_mw = cfg.power_high_mw;
  exp.scene.min_source_separation = cfg.min_separation;
  exp.algo.k_sources = cfg.sources;
  exp.algo.n_grid = cfg.grid_n;
  exp.algo.iterations = cfg.iterations;
  exp.algo.lambda = cfg.lambda;
  exp.algo.power_low_mw = cfg.power_low_mw;
  exp.algo.power_high_mw = cfg.power_high_mw;
  exp.algo.sigma_low_db = cfg.sigma_low_db;
  exp.algo.sigma_high_db = cfg.sigma_high_db;
  exp.algo.sigma_init_db = cfg.sigma_init_db;
  exp.algorithm = cfg.algorithm;
  exp.n_trials = cfg.trials;
  exp.master_seed = cfg.seed;
  exp.rmef_d = cfg.rmef_d;
  return exp;
}

}  // namespace rmsl
