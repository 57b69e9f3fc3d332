#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmsl/geometry.hpp"

namespace rmsl {

struct Source {
  Pt loc;
  double power_mw = 0.0;
};

struct Scene {
  Roi roi;
  std::vector<Pt> sensors;
  std::vector<Source> sources;
  double alpha = 2.5;       // path-loss exponent
  double sigma_db = 4.0;    // shadowing std dev in dB
};

// One RSS snapshot: rss[m] is the linear-scale (mW) reading at sensors[m].
struct Observation {
  Roi roi;
  double alpha = 2.5;
  std::vector<Pt> sensors;
  std::vector<double> rss;
};

struct SceneGenConfig {
  Roi roi{2000.0, 2000.0};
  int n_sensors = 90;
  int n_sources = 3;
  double alpha = 2.5;
  double sigma_db = 4.0;
  double power_low_mw = 2000.0;
  double power_high_mw = 4000.0;
  double min_source_separation = 100.0;  // keeps sources resolvable
};

// throws std::invalid_argument if fields are inconsistent (empty sensors,
// out-of-region points, nonpositive powers/alpha, negative sigma)
void validate_scene(const Scene& scene);

// Superimposed power-law attenuation with per-(sensor,source) log-normal
// shadowing:  r_m = sum_k P_k * max(d_mk,1)^-alpha * 10^(sigma*z_mk/10).
// sigma_db == 0 gives the deterministic mean field.
Observation simulate_rss(const Scene& scene, std::uint64_t seed);

// Uniform sensor/source placement over the region; sources are redrawn until
// pairwise separation >= min_source_separation (bounded retries, then throws
// std::runtime_error).  Powers are uniform on [power_low, power_high].
Scene generate_scene(const SceneGenConfig& cfg, std::uint64_t seed);

// Plain-text round-trippable serialization (%.17g, so values survive exactly).
std::string scene_to_text(const Scene& scene);
Scene scene_from_text(const std::string& text);
void save_scene(const std::string& path, const Scene& scene);
Scene load_scene(const std::string& path);

// Observation files: header (roi, alpha) then one "id u v rss" row per sensor.
std::string observation_to_text(const Observation& obs);
Observation observation_from_text(const std::string& text);
void save_observation(const std::string& path, const Observation& obs);
Observation load_observation(const std::string& path);

}  // namespace rmsl
