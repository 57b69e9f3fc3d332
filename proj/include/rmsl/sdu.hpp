#pragma once

#include <cstdint>
#include <vector>

#include "rmsl/ml_estimator.hpp"
#include "rmsl/scene.hpp"
#include "rmsl/sparse.hpp"
#include "rmsl/theta.hpp"

namespace rmsl {

struct SduConfig {
  int k_sources = 3;
  int n_grid = 441;          // perfect square
  int iterations = 7;
  double lambda = 1e-3;      // relative l1 weight for the sparse stage
  double power_low_mw = 2000.0;
  double power_high_mw = 4000.0;
  double sigma_low_db = 0.5;
  double sigma_high_db = 14.0;
  double sigma_init_db = 6.0;  // mid-range starting guess for the first round
  SolverOpts solver;
  // fraction of sqrt(region area) used as the minimum seed spacing
  double seed_diversity_frac = 0.10;
  // stop after this many rounds without likelihood improvement
  int stall_limit = 3;
};

struct SduIterationTrace {
  double objective = 0.0;             // NLL of this round's estimate
  std::vector<Pt> locations;
  Eigen::VectorXd s_hat;              // recovered grid powers (for dumping)
  int grid_size = 0;
  bool ml_failed = false;
};

struct SduResult {
  std::vector<Pt> locations;    // K estimated source positions
  Eigen::VectorXd powers;       // K estimated transmit powers, mW
  double sigma_db = 0.0;        // estimated shadowing std dev
  double objective = 0.0;       // NLL at the returned estimate
  int best_iteration = 0;       // 1-based round the estimate came from
  bool ml_failed_any = false;
  std::vector<SduIterationTrace> trace;
};

// Merge additions into the grid and drop removals; points are matched at
// 1e-9 resolution, duplicates are never created, and removing an absent
// point is a no-op.  Additions keep their given order after the kept points.
Grid update_grid(const Grid& grid, const std::vector<Pt>& additions,
                 const std::vector<Pt>& removals);

// Alternating sparse-seeding / ML-refinement loop.  Each round recovers a
// gridded power vector, clusters its strong entries into K seeds (padded with
// spaced, previously unused high-weight grid points when fewer survive),
// refines by bounded ML, then re-centers the grid on the estimates by
// swapping the K weakest recovered points for the K refined positions.
// Returns the iterate with the best likelihood; stops early after
// `stall_limit` rounds without improvement.
SduResult run_sdu(const Observation& obs, const SduConfig& cfg,
                  std::uint64_t seed);

// single sparse seeding round followed by one ML refinement (no grid updates)
SduResult run_sr_ml(const Observation& obs, const SduConfig& cfg,
                    std::uint64_t seed);

}  // namespace rmsl
