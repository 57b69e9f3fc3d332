#include "rmsl/scene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rmsl/random.hpp"

namespace rmsl {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& what) {
  throw std::invalid_argument("scene parse: " + what);
}

// reads one line, skipping blanks and '#' comments; false at EOF
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

void validate_scene(const Scene& scene) {
  if (scene.roi.length_l <= 0.0 || scene.roi.width_w <= 0.0)
    throw std::invalid_argument("scene: region dimensions must be positive");
  if (scene.sensors.empty())
    throw std::invalid_argument("scene: at least one sensor required");
  if (scene.sources.empty())
    throw std::invalid_argument("scene: at least one source required");
  if (!(scene.alpha > 0.0))
    throw std::invalid_argument("scene: path-loss exponent must be positive");
  if (scene.sigma_db < 0.0)
    throw std::invalid_argument("scene: shadowing sigma must be nonnegative");
  for (const Pt& s : scene.sensors)
    if (!scene.roi.contains(s))
      throw std::invalid_argument("scene: sensor outside region");
  for (const Source& s : scene.sources) {
    if (!scene.roi.contains(s.loc))
      throw std::invalid_argument("scene: source outside region");
    if (!(s.power_mw > 0.0))
      throw std::invalid_argument("scene: source power must be positive");
  }
}

Observation simulate_rss(const Scene& scene, std::uint64_t seed) {
  validate_scene(scene);
  Rng rng(seed);
  Observation obs;
  obs.roi = scene.roi;
  obs.alpha = scene.alpha;
  obs.sensors = scene.sensors;
  obs.rss.resize(scene.sensors.size());
  for (std::size_t m = 0; m < scene.sensors.size(); ++m) {
    double total = 0.0;
    for (const Source& src : scene.sources) {
      const double d = clamped_distance(scene.sensors[m], src.loc);
      const double fade =
          std::pow(10.0, scene.sigma_db * rng.normal() / 10.0);
      total += src.power_mw * std::pow(d, -scene.alpha) * fade;
    }
    obs.rss[m] = total;
  }
  return obs;
}

Scene generate_scene(const SceneGenConfig& cfg, std::uint64_t seed) {
  if (cfg.n_sensors < 1 || cfg.n_sources < 1)
    throw std::invalid_argument("generate_scene: counts must be positive");
  if (!(cfg.power_high_mw >= cfg.power_low_mw) || !(cfg.power_low_mw > 0.0))
    throw std::invalid_argument("generate_scene: bad power range");
  Rng rng(seed);
  Scene scene;
  scene.roi = cfg.roi;
  scene.alpha = cfg.alpha;
  scene.sigma_db = cfg.sigma_db;
  scene.sensors.reserve(cfg.n_sensors);
  for (int m = 0; m < cfg.n_sensors; ++m) {
    Pt p{rng.uniform(0.0, cfg.roi.length_l), rng.uniform(0.0, cfg.roi.width_w)};
    scene.sensors.push_back(p);
  }
  scene.sources.reserve(cfg.n_sources);
  const int max_attempts = 10000;
  for (int k = 0; k < cfg.n_sources; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      Pt p{rng.uniform(0.0, cfg.roi.length_l),
           rng.uniform(0.0, cfg.roi.width_w)};
      bool ok = true;
      for (const Source& prev : scene.sources)
        if (distance(p, prev.loc) < cfg.min_source_separation) {
          ok = false;
          break;
        }
      if (ok) {
        scene.sources.push_back({p, 0.0});
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "generate_scene: could not satisfy source separation; region too "
          "crowded");
  }
  for (Source& s : scene.sources)
    s.power_mw = rng.uniform(cfg.power_low_mw, cfg.power_high_mw);
  validate_scene(scene);
  return scene;
}

std::string scene_to_text(const Scene& scene) {
  std::ostringstream out;
  out << "roi " << fmt17(scene.roi.length_l) << ' ' << fmt17(scene.roi.width_w)
      << '\n';
  out << "alpha " << fmt17(scene.alpha) << '\n';
  out << "sigma " << fmt17(scene.sigma_db) << '\n';
  out << "sources " << scene.sources.size() << '\n';
  for (const Source& s : scene.sources)
    out << fmt17(s.loc.u) << ' ' << fmt17(s.loc.v) << ' ' << fmt17(s.power_mw)
        << '\n';
  out << "sensors " << scene.sensors.size() << '\n';
  for (const Pt& p : scene.sensors)
    out << fmt17(p.u) << ' ' << fmt17(p.v) << '\n';
  return out.str();
}

Scene scene_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag;
  Scene scene;
  if (!next_line(in, line)) parse_fail("empty input");
  {
    std::istringstream row(line);
    if (!(row >> tag >> scene.roi.length_l >> scene.roi.width_w) ||
        tag != "roi")
      parse_fail("expected 'roi <l> <w>'");
  }
  if (!next_line(in, line)) parse_fail("missing alpha");
  {
    std::istringstream row(line);
    if (!(row >> tag >> scene.alpha) || tag != "alpha")
      parse_fail("expected 'alpha <value>'");
  }
  if (!next_line(in, line)) parse_fail("missing sigma");
  {
    std::istringstream row(line);
    if (!(row >> tag >> scene.sigma_db) || tag != "sigma")
      parse_fail("expected 'sigma <value>'");
  }
  std::size_t n_sources = 0;
  if (!next_line(in, line)) parse_fail("missing sources");
  {
    std::istringstream row(line);
    if (!(row >> tag >> n_sources) || tag != "sources")
      parse_fail("expected 'sources <count>'");
  }
  for (std::size_t k = 0; k < n_sources; ++k) {
    if (!next_line(in, line)) parse_fail("truncated source list");
    std::istringstream row(line);
    Source s;
    if (!(row >> s.loc.u >> s.loc.v >> s.power_mw))
      parse_fail("bad source row");
    scene.sources.push_back(s);
  }
  std::size_t n_sensors = 0;
  if (!next_line(in, line)) parse_fail("missing sensors");
  {
    std::istringstream row(line);
    if (!(row >> tag >> n_sensors) || tag != "sensors")
      parse_fail("expected 'sensors <count>'");
  }
  for (std::size_t m = 0; m < n_sensors; ++m) {
    if (!next_line(in, line)) parse_fail("truncated sensor list");
    std::istringstream row(line);
    Pt p;
    if (!(row >> p.u >> p.v)) parse_fail("bad sensor row");
    scene.sensors.push_back(p);
  }
  validate_scene(scene);
  return scene;
}

void save_scene(const std::string& path, const Scene& scene) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << scene_to_text(scene);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scene_from_text(buf.str());
}

std::string observation_to_text(const Observation& obs) {
  std::ostringstream out;
  out << "roi " << fmt17(obs.roi.length_l) << ' ' << fmt17(obs.roi.width_w)
      << '\n';
  out << "alpha " << fmt17(obs.alpha) << '\n';
  out << "sensors " << obs.sensors.size() << '\n';
  for (std::size_t m = 0; m < obs.sensors.size(); ++m)
    out << m << ' ' << fmt17(obs.sensors[m].u) << ' ' << fmt17(obs.sensors[m].v)
        << ' ' << fmt17(obs.rss[m]) << '\n';
  return out.str();
}

Observation observation_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag;
  Observation obs;
  if (!next_line(in, line)) parse_fail("empty observation");
  {
    std::istringstream row(line);
    if (!(row >> tag >> obs.roi.length_l >> obs.roi.width_w) || tag != "roi")
      parse_fail("expected 'roi <l> <w>'");
  }
  if (!next_line(in, line)) parse_fail("missing alpha");
  {
    std::istringstream row(line);
    if (!(row >> tag >> obs.alpha) || tag != "alpha")
      parse_fail("expected 'alpha <value>'");
  }
  std::size_t n_sensors = 0;
  if (!next_line(in, line)) parse_fail("missing sensor count");
  {
    std::istringstream row(line);
    if (!(row >> tag >> n_sensors) || tag != "sensors")
      parse_fail("expected 'sensors <count>'");
  }
  for (std::size_t m = 0; m < n_sensors; ++m) {
    if (!next_line(in, line)) parse_fail("truncated sensor rows");
    std::istringstream row(line);
    std::size_t id = 0;
    Pt p;
    double rss = 0.0;
    if (!(row >> id >> p.u >> p.v >> rss)) parse_fail("bad sensor row");
    if (id != m) parse_fail("sensor ids must be 0..M-1 in order");
    obs.sensors.push_back(p);
    obs.rss.push_back(rss);
  }
  if (obs.sensors.empty()) parse_fail("observation has no sensors");
  if (obs.roi.length_l <= 0.0 || obs.roi.width_w <= 0.0)
    parse_fail("region dimensions must be positive");
  if (!(obs.alpha > 0.0)) parse_fail("alpha must be positive");
  for (double r : obs.rss)
    if (!(r >= 0.0) || !std::isfinite(r)) parse_fail("rss must be finite and nonnegative");
  return obs;
}

void save_observation(const std::string& path, const Observation& obs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << observation_to_text(obs);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Observation load_observation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open observation file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return observation_from_text(buf.str());
}

}  // namespace rmsl
