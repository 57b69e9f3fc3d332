#include "rmsl/sdu.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "rmsl/random.hpp"

namespace rmsl {

namespace {

using Key = std::pair<long long, long long>;

Key key_of(const Pt& p) {
  return {std::llround(p.u * 1e9), std::llround(p.v * 1e9)};
}

// shared bookkeeping for update_grid and the dictionary-reusing variant
void plan_update(const Grid& grid, const std::vector<Pt>& additions,
                 const std::vector<Pt>& removals, std::vector<int>& kept,
                 std::vector<Pt>& accepted) {
  std::set<Key> to_remove;
  for (const Pt& p : removals) to_remove.insert(key_of(p));
  std::set<Key> present;
  kept.clear();
  for (int n = 0; n < grid.size(); ++n) {
    if (to_remove.count(key_of(grid.points[n]))) continue;
    kept.push_back(n);
    present.insert(key_of(grid.points[n]));
  }
  accepted.clear();
  for (const Pt& p : additions) {
    const Key k = key_of(p);
    if (present.count(k)) continue;
    present.insert(k);
    accepted.push_back(p);
  }
}

Eigen::VectorXd clip_powers(Eigen::VectorXd p, const SduConfig& cfg) {
  for (int k = 0; k < p.size(); ++k)
    p[k] = std::min(std::max(p[k], cfg.power_low_mw), cfg.power_high_mw);
  return p;
}

// carry powers across rounds: repeatedly pair the globally closest
// (new seed, previous estimate) and hand over that estimate's power
Eigen::VectorXd match_powers(const std::vector<Pt>& seeds,
                             const std::vector<Pt>& prev_locs,
                             const Eigen::VectorXd& prev_powers) {
  const int k = static_cast<int>(seeds.size());
  Eigen::VectorXd out(k);
  std::vector<bool> seed_used(k, false), prev_used(k, false);
  for (int round = 0; round < k; ++round) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (seed_used[i]) continue;
      for (int j = 0; j < k; ++j) {
        if (prev_used[j]) continue;
        const double d = distance(seeds[i], prev_locs[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    out[bi] = prev_powers[bj];
    seed_used[bi] = true;
    prev_used[bj] = true;
  }
  return out;
}

void check_config(const Observation& obs, const SduConfig& cfg) {
  if (cfg.k_sources < 1)
    throw std::invalid_argument("run_sdu: k_sources must be >= 1");
  if (cfg.iterations < 1)
    throw std::invalid_argument("run_sdu: iterations must be >= 1");
  if (obs.sensors.empty() || obs.sensors.size() != obs.rss.size())
    throw std::invalid_argument("run_sdu: malformed observation");
  for (double r : obs.rss)
    if (!(r > 0.0))
      throw std::invalid_argument("run_sdu: readings must be positive");
}

}  // namespace

Grid update_grid(const Grid& grid, const std::vector<Pt>& additions,
                 const std::vector<Pt>& removals) {
  std::vector<int> kept;
  std::vector<Pt> accepted;
  plan_update(grid, additions, removals, kept, accepted);
  Grid out;
  out.roi = grid.roi;
  out.points.reserve(kept.size() + accepted.size());
  for (int n : kept) out.points.push_back(grid.points[n]);
  for (const Pt& p : accepted) out.points.push_back(p);
  return out;
}

SduResult run_sdu(const Observation& obs, const SduConfig& cfg,
                  std::uint64_t seed) {
  check_config(obs, cfg);
  const int k = cfg.k_sources;

  ThetaBounds bounds;
  bounds.roi = obs.roi;
  bounds.power_low_mw = cfg.power_low_mw;
  bounds.power_high_mw = cfg.power_high_mw;
  bounds.sigma_low_db = cfg.sigma_low_db;
  bounds.sigma_high_db = cfg.sigma_high_db;

  GridDictionary dict =
      build_dictionary(build_grid(obs.roi, cfg.n_grid), obs.sensors, obs.alpha);
  Eigen::VectorXd rss = Eigen::Map<const Eigen::VectorXd>(
      obs.rss.data(), static_cast<long>(obs.rss.size()));

  const double rho =
      cfg.seed_diversity_frac * std::sqrt(obs.roi.area());

  std::vector<Pt> prev_locs;
  Eigen::VectorXd prev_powers =
      Eigen::VectorXd::Constant(k, 0.5 * (cfg.power_low_mw + cfg.power_high_mw));
  double prev_sigma = std::min(std::max(cfg.sigma_init_db, cfg.sigma_low_db),
                               cfg.sigma_high_db);

  SeedMemory memory;
  SduResult result;
  double best_f = std::numeric_limits<double>::infinity();
  int stall = 0;

  // fallback in case no round ever produces a finite likelihood
  std::vector<Pt> last_locs;
  Eigen::VectorXd last_powers = prev_powers;
  double last_sigma = prev_sigma;

  for (int round = 1; round <= cfg.iterations; ++round) {
    SparseSolution sp = solve_sparse(dict, rss, cfg.lambda);
    const std::vector<int> discard_idx = select_discard_set(sp.s_hat, k);
    const double thr = adaptive_threshold(sp.s_hat);
    std::vector<Candidate> cands =
        truncate_candidates(sp.s_hat, dict.grid, thr);

    SeedingOptions so;
    so.weights_full = &sp.s_hat;
    so.grid = &dict.grid;
    so.diversity_radius = rho;
    so.memory = &memory;
    std::vector<Pt> seeds =
        cluster_centers(cands, k, derive_seed(seed, 2, round), so);
    for (Pt& p : seeds) {
      p.u = std::min(std::max(p.u, 0.0), obs.roi.length_l);
      p.v = std::min(std::max(p.v, 0.0), obs.roi.width_w);
      memory.remember(p);
    }

    Eigen::VectorXd p0 =
        prev_locs.empty()
            ? prev_powers
            : match_powers(seeds, prev_locs, prev_powers);
    ThetaEstimate init;
    init.locations = seeds;
    init.powers = clip_powers(p0, cfg);
    init.sigma_db = std::min(std::max(prev_sigma, cfg.sigma_low_db),
                             cfg.sigma_high_db);

    ThetaEstimate est = init;
    double objective = std::numeric_limits<double>::infinity();
    bool failed = false;
    try {
      SolveReport rep = solve_ml(init, obs, bounds, cfg.solver);
      est = rep.theta;
      objective = rep.objective;
    } catch (const std::exception&) {
      // keep the seeds as this round's estimate; likelihood may still be
      // computable for best-iterate tracking
      failed = true;
      result.ml_failed_any = true;
      try {
        objective = nll(init, obs);
      } catch (const std::exception&) {
        objective = std::numeric_limits<double>::infinity();
      }
    }

    SduIterationTrace tr;
    tr.objective = objective;
    tr.locations = est.locations;
    tr.s_hat = sp.s_hat;
    tr.grid_size = dict.grid.size();
    tr.ml_failed = failed;
    result.trace.push_back(std::move(tr));

    const bool improved =
        std::isfinite(objective) &&
        (result.best_iteration == 0 ||
         objective < best_f - 1e-9 * std::max(1.0, std::abs(best_f)));
    if (improved) {
      best_f = objective;
      result.locations = est.locations;
      result.powers = est.powers;
      result.sigma_db = est.sigma_db;
      result.objective = objective;
      result.best_iteration = round;
      stall = 0;
    } else {
      ++stall;
      if (stall >= cfg.stall_limit) break;
    }

    prev_locs = est.locations;
    prev_powers = est.powers;
    prev_sigma = est.sigma_db;
    last_locs = est.locations;
    last_powers = est.powers;
    last_sigma = est.sigma_db;

    if (round < cfg.iterations) {
      // re-center the grid: drop the K weakest recovered points, add the K
      // refined positions so the next dictionary can represent them exactly
      std::vector<Pt> removals;
      for (int idx : discard_idx) removals.push_back(dict.grid.points[idx]);
      std::vector<int> kept;
      std::vector<Pt> accepted;
      plan_update(dict.grid, est.locations, removals, kept, accepted);
      Grid next;
      next.roi = dict.grid.roi;
      next.points.reserve(kept.size() + accepted.size());
      for (int n : kept) next.points.push_back(dict.grid.points[n]);
      for (const Pt& p : accepted) next.points.push_back(p);
      // rebuild the dictionary reusing unchanged columns
      const int m_rows = static_cast<int>(obs.sensors.size());
      Eigen::MatrixXd phi(m_rows, next.size());
      for (std::size_t c = 0; c < kept.size(); ++c)
        phi.col(static_cast<long>(c)) = dict.phi.col(kept[c]);
      for (std::size_t c = 0; c < accepted.size(); ++c) {
        const long col = static_cast<long>(kept.size() + c);
        for (int m = 0; m < m_rows; ++m)
          phi(m, col) = std::pow(
              clamped_distance(obs.sensors[m], accepted[c]), -obs.alpha);
      }
      dict.grid = std::move(next);
      dict.phi = std::move(phi);
    }
  }

  if (result.best_iteration == 0) {
    // every round failed to produce a finite likelihood; fall back to the
    // last seeds rather than returning nothing
    result.locations = last_locs.empty() ? std::vector<Pt>(k) : last_locs;
    result.powers = last_powers;
    result.sigma_db = last_sigma;
    result.objective = std::numeric_limits<double>::infinity();
    result.best_iteration = static_cast<int>(result.trace.size());
  }
  return result;
}

SduResult run_sr_ml(const Observation& obs, const SduConfig& cfg,
                    std::uint64_t seed) {
  SduConfig single = cfg;
  single.iterations = 1;
  return run_sdu(obs, single, seed);
}

}  // namespace rmsl
