#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "rmsl/geometry.hpp"

namespace rmsl {

// Uniform candidate lattice over the region, corners included.  Points are
// ordered row by row: index n = i*side + j maps to (j*du, i*dv).
struct Grid {
  Roi roi;
  std::vector<Pt> points;

  int size() const { return static_cast<int>(points.size()); }
};

struct GridDictionary {
  Grid grid;
  Eigen::MatrixXd phi;  // M x N, phi(m,n) = max(d_mn,1)^-alpha
  double alpha = 2.5;
};

// n_points must be a perfect square >= 4
Grid build_grid(const Roi& roi, int n_points);

GridDictionary build_dictionary(const Grid& grid,
                                const std::vector<Pt>& sensors, double alpha);

struct SparseSolution {
  Eigen::VectorXd s_hat;        // length N, nonnegative, power scale
  std::vector<int> support;     // indices with s_hat > 0
  int iterations = 0;
  bool converged = false;
};

// Nonnegative l1-regularized recovery of a gridded power vector from one RSS
// snapshot.  Rows are whitened by 1/r_m (shadowing noise is multiplicative,
// so residual scale tracks the reading itself) and columns unit-normalized
// internally; lambda is relative to the largest back-projected correlation,
// which keeps one default usable across power scales and sensor counts.
SparseSolution solve_sparse(const GridDictionary& dict,
                            const Eigen::VectorXd& rss, double lambda);

// max(s) minus the population standard deviation over all entries
double adaptive_threshold(const Eigen::VectorXd& s_hat);

struct Candidate {
  Pt point;
  double weight = 0.0;
  int grid_index = -1;
};

// keeps entries with s_hat[n] >= threshold; the maximum always survives
std::vector<Candidate> truncate_candidates(const Eigen::VectorXd& s_hat,
                                           const Grid& grid, double threshold);

// Positions already used as cluster seeds in earlier rounds (keyed at 1e-6
// resolution).  Carrying this across rounds makes repeated seeding explore
// fresh grid regions instead of re-proposing the same points.
struct SeedMemory {
  std::set<std::pair<long long, long long>> used;

  void remember(const Pt& p);
  bool contains(const Pt& p) const;
};

struct SeedingOptions {
  // full-grid weight vector and grid, enabling rank-based padding when the
  // candidate set is smaller than k
  const Eigen::VectorXd* weights_full = nullptr;
  const Grid* grid = nullptr;
  // minimum pairwise spacing enforced on padded/replacement seeds (0 = off)
  double diversity_radius = 0.0;
  const SeedMemory* memory = nullptr;
  // padding pool = this factor times k of the highest-weight grid points
  int pool_window_factor = 6;
};

// Weighted k-means (10 restarts, weighted-sampling init) over the candidate
// points; final centers are weight-averaged per cluster.  When fewer than k
// candidates exist, seeds are padded from the grid by descending weight
// (subject to the diversity rules in `opts`), or by repeating the strongest
// candidate when no grid is available.
std::vector<Pt> cluster_centers(const std::vector<Candidate>& candidates,
                                int k, std::uint64_t seed,
                                const SeedingOptions& opts = {});

// Indices of the k smallest strictly-positive entries (ties keep the lowest
// index); fewer are returned when fewer positives exist.  Entries below
// 1e-12 * max(s_hat) count as zero.
std::vector<int> select_discard_set(const Eigen::VectorXd& s_hat, int k);

}  // namespace rmsl
