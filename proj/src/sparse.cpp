#include "rmsl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "rmsl/random.hpp"

namespace rmsl {

Grid build_grid(const Roi& roi, int n_points) {
  if (roi.length_l <= 0.0 || roi.width_w <= 0.0)
    throw std::invalid_argument("build_grid: region must have positive size");
  if (n_points < 4)
    throw std::invalid_argument("build_grid: need at least 4 points");
  const int side = static_cast<int>(std::lround(std::sqrt(double(n_points))));
  if (side * side != n_points)
    throw std::invalid_argument("build_grid: point count must be a perfect square");
  Grid grid;
  grid.roi = roi;
  grid.points.reserve(n_points);
  const double du = roi.length_l / (side - 1);
  const double dv = roi.width_w / (side - 1);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      grid.points.push_back({j * du, i * dv});
  return grid;
}

GridDictionary build_dictionary(const Grid& grid,
                                const std::vector<Pt>& sensors, double alpha) {
  if (sensors.empty())
    throw std::invalid_argument("build_dictionary: no sensors");
  if (grid.points.empty())
    throw std::invalid_argument("build_dictionary: empty grid");
  if (!(alpha > 0.0))
    throw std::invalid_argument("build_dictionary: alpha must be positive");
  GridDictionary dict;
  dict.grid = grid;
  dict.alpha = alpha;
  const int m_rows = static_cast<int>(sensors.size());
  const int n_cols = grid.size();
  dict.phi.resize(m_rows, n_cols);
  for (int m = 0; m < m_rows; ++m)
    for (int n = 0; n < n_cols; ++n)
      dict.phi(m, n) =
          std::pow(clamped_distance(sensors[m], grid.points[n]), -alpha);
  return dict;
}

SparseSolution solve_sparse(const GridDictionary& dict,
                            const Eigen::VectorXd& rss, double lambda) {
  const int m_rows = static_cast<int>(dict.phi.rows());
  const int n_cols = static_cast<int>(dict.phi.cols());
  if (rss.size() != m_rows)
    throw std::invalid_argument("solve_sparse: reading count mismatch");
  if (lambda < 0.0)
    throw std::invalid_argument("solve_sparse: lambda must be nonnegative");
  for (int m = 0; m < m_rows; ++m)
    if (!std::isfinite(rss[m]) || rss[m] < 0.0)
      throw std::invalid_argument("solve_sparse: readings must be finite and nonnegative");

  SparseSolution sol;
  sol.s_hat = Eigen::VectorXd::Zero(n_cols);
  const double rmax = rss.size() > 0 ? rss.maxCoeff() : 0.0;
  if (!(rmax > 0.0)) {
    sol.converged = true;
    return sol;  // nothing to explain
  }

  // Row whitening: residuals are weighted by 1/r_m, matching the
  // multiplicative noise (equal relative error per sensor).  Columns are then
  // unit-normalized so one step size serves the whole dictionary; the scale
  // is undone on output.
  Eigen::VectorXd w(m_rows), rw(m_rows);
  for (int m = 0; m < m_rows; ++m) {
    w[m] = 1.0 / std::max(rss[m], 1e-12 * rmax);
    rw[m] = rss[m] > 0.0 ? 1.0 : 0.0;
  }
  Eigen::MatrixXd pn = w.asDiagonal() * dict.phi;
  Eigen::VectorXd cn(n_cols);
  for (int n = 0; n < n_cols; ++n) {
    double nrm = pn.col(n).norm();
    cn[n] = nrm > 0.0 ? nrm : 1.0;
    pn.col(n) /= cn[n];
  }
  const double lam_eff = lambda * (pn.transpose() * rw).cwiseAbs().maxCoeff();

  // largest eigenvalue of Pn'Pn by power iteration -> Lipschitz step
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n_cols, 1.0 / std::sqrt(double(n_cols)));
  double lip = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd q = pn.transpose() * (pn * v);
    const double nv = q.norm();
    if (nv == 0.0) break;
    lip = nv;
    v = q / nv;
  }
  const double eta = 1.0 / std::max(lip, 1e-30);

  auto objective = [&](const Eigen::VectorXd& x) {
    return 0.5 * (rw - pn * x).squaredNorm() + lam_eff * x.sum();
  };

  // monotone accelerated proximal gradient with restart-on-increase
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_cols);
  Eigen::VectorXd y = s;
  double t = 1.0;
  double f_best = 0.5 * rw.squaredNorm();
  const int max_iterations = 1000;
  const double tol = 1e-8;
  for (int it = 0; it < max_iterations; ++it) {
    sol.iterations = it + 1;
    Eigen::VectorXd g = pn.transpose() * (pn * y - rw);
    Eigen::VectorXd sn =
        (y - eta * (g.array() + lam_eff).matrix()).cwiseMax(0.0);
    double fn = objective(sn);
    if (fn > f_best) {
      // acceleration overshot; restart momentum from the last accepted point
      t = 1.0;
      g = pn.transpose() * (pn * s - rw);
      sn = (s - eta * (g.array() + lam_eff).matrix()).cwiseMax(0.0);
      fn = objective(sn);
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = sn + ((t - 1.0) / tn) * (sn - s);
    const double dn = (sn - s).norm() / std::max(1.0, s.norm());
    s = sn;
    t = tn;
    f_best = std::min(f_best, fn);
    if (dn < tol) {
      sol.converged = true;
      break;
    }
  }

  // never return something worse than the trivial zero solution
  if (objective(s) > 0.5 * rw.squaredNorm()) {
    sol.s_hat.setZero();
    sol.support.clear();
    return sol;
  }

  sol.s_hat = s.array() / cn.array();
  for (int n = 0; n < n_cols; ++n)
    if (sol.s_hat[n] > 0.0) sol.support.push_back(n);
  return sol;
}

double adaptive_threshold(const Eigen::VectorXd& s_hat) {
  if (s_hat.size() == 0)
    throw std::invalid_argument("adaptive_threshold: empty input");
  const double mx = s_hat.maxCoeff();
  const double mean = s_hat.mean();
  const double var = (s_hat.array() - mean).square().sum() / s_hat.size();
  return mx - std::sqrt(var);
}

std::vector<Candidate> truncate_candidates(const Eigen::VectorXd& s_hat,
                                           const Grid& grid,
                                           double threshold) {
  if (s_hat.size() != grid.size())
    throw std::invalid_argument("truncate_candidates: size mismatch");
  std::vector<Candidate> out;
  for (int n = 0; n < s_hat.size(); ++n)
    if (s_hat[n] >= threshold)
      out.push_back({grid.points[n], s_hat[n], n});
  return out;
}

void SeedMemory::remember(const Pt& p) {
  used.insert({std::llround(p.u * 1e6), std::llround(p.v * 1e6)});
}

bool SeedMemory::contains(const Pt& p) const {
  return used.count({std::llround(p.u * 1e6), std::llround(p.v * 1e6)}) > 0;
}

namespace {

// indices of `weights` sorted descending, ties by lower index first
std::vector<int> rank_descending(const Eigen::VectorXd& weights) {
  std::vector<int> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  return order;
}

struct KmeansResult {
  std::vector<Pt> centers;
  std::vector<int> assignment;
};

KmeansResult kmeans_weighted(const std::vector<Pt>& pts,
                             const std::vector<double>& w, int k, Rng& rng) {
  const int n = static_cast<int>(pts.size());
  const int restarts = 10;
  const int lloyd_cap = 100;
  std::vector<Pt> best_centers;
  std::vector<int> best_assign;
  double best_score = std::numeric_limits<double>::infinity();

  auto assign_and_score = [&](const std::vector<Pt>& centers,
                              std::vector<int>& assign) {
    double score = 0.0;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double du = pts[i].u - centers[c].u, dv = pts[i].v - centers[c].v;
        double d2 = du * du + dv * dv;
        if (d2 < best_d) {
          best_d = d2;
          arg = c;
        }
      }
      assign[i] = arg;
      score += best_d;
    }
    return score;
  };

  for (int r = 0; r < restarts; ++r) {
    std::vector<std::size_t> init =
        rng.weighted_sample_without_replacement(w, k);
    std::vector<Pt> centers(k);
    for (int c = 0; c < k; ++c) centers[c] = pts[init[c]];
    std::vector<int> assign(n, 0);
    for (int pass = 0; pass < lloyd_cap; ++pass) {
      assign_and_score(centers, assign);
      // farthest-from-its-center point, used to revive empty clusters
      int far_idx = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        double du = pts[i].u - centers[assign[i]].u;
        double dv = pts[i].v - centers[assign[i]].v;
        double d2 = du * du + dv * dv;
        if (d2 > far_d) {
          far_d = d2;
          far_idx = i;
        }
      }
      std::vector<Pt> next(k);
      for (int c = 0; c < k; ++c) {
        double su = 0.0, sv = 0.0;
        int cnt = 0;
        for (int i = 0; i < n; ++i)
          if (assign[i] == c) {
            su += pts[i].u;
            sv += pts[i].v;
            ++cnt;
          }
        next[c] = cnt > 0 ? Pt{su / cnt, sv / cnt} : pts[far_idx];
      }
      bool settled = true;
      for (int c = 0; c < k; ++c) {
        if (std::abs(next[c].u - centers[c].u) >
                1e-8 + 1e-5 * std::abs(centers[c].u) ||
            std::abs(next[c].v - centers[c].v) >
                1e-8 + 1e-5 * std::abs(centers[c].v))
          settled = false;
      }
      centers = next;
      if (settled) break;
    }
    std::vector<int> assign_final(n, 0);
    const double score = assign_and_score(centers, assign_final);
    if (score < best_score) {
      best_score = score;
      best_centers = centers;
      best_assign = assign_final;
    }
  }

  // final centers: weight-averaged members (the lattice mean ignores how much
  // recovered power sits on each point; the weighted mean is the actual
  // power centroid)
  KmeansResult out;
  out.centers.resize(k);
  out.assignment = best_assign;
  int heaviest = 0;
  for (int i = 1; i < n; ++i)
    if (w[i] > w[heaviest]) heaviest = i;
  for (int c = 0; c < k; ++c) {
    double su = 0.0, sv = 0.0, sw = 0.0;
    for (int i = 0; i < n; ++i)
      if (best_assign[i] == c) {
        su += w[i] * pts[i].u;
        sv += w[i] * pts[i].v;
        sw += w[i];
      }
    out.centers[c] = sw > 0.0 ? Pt{su / sw, sv / sw} : pts[heaviest];
  }
  return out;
}

}  // namespace

std::vector<Pt> cluster_centers(const std::vector<Candidate>& candidates,
                                int k, std::uint64_t seed,
                                const SeedingOptions& opts) {
  if (k < 1) throw std::invalid_argument("cluster_centers: k must be >= 1");
  if (candidates.empty())
    throw std::invalid_argument("cluster_centers: no candidates");

  std::vector<Pt> pts;
  std::vector<double> wts;
  std::unordered_set<int> have;
  for (const Candidate& c : candidates) {
    pts.push_back(c.point);
    wts.push_back(c.weight);
    if (c.grid_index >= 0) have.insert(c.grid_index);
  }

  const bool pool_available = opts.weights_full != nullptr &&
                              opts.grid != nullptr &&
                              opts.weights_full->size() == opts.grid->size();
  std::vector<int> order_all;
  std::vector<int> window;
  if (pool_available) {
    order_all = rank_descending(*opts.weights_full);
    const int limit = std::min<int>(opts.pool_window_factor * k,
                                    static_cast<int>(order_all.size()));
    for (int i = 0; i < limit; ++i)
      if ((*opts.weights_full)[order_all[i]] > 0.0)
        window.push_back(order_all[i]);
  }

  // pad to k seeds: walk the high-weight pool, preferring points far from the
  // seeds we already have and not used in earlier rounds; relax the memory
  // constraint, then the pool, before falling back to repetition
  if (static_cast<int>(pts.size()) < k && pool_available) {
    auto try_fill = [&](bool respect_memory) {
      for (int n : window) {
        if (static_cast<int>(pts.size()) >= k) return;
        if (have.count(n)) continue;
        const Pt& p = opts.grid->points[n];
        if (respect_memory && opts.memory && opts.memory->contains(p)) continue;
        if (opts.diversity_radius > 0.0) {
          bool spaced = true;
          for (const Pt& q : pts)
            if (distance(p, q) < opts.diversity_radius) {
              spaced = false;
              break;
            }
          if (!spaced) continue;
        }
        pts.push_back(p);
        wts.push_back((*opts.weights_full)[n]);
        have.insert(n);
      }
    };
    try_fill(true);
    if (static_cast<int>(pts.size()) < k) try_fill(false);
    for (int n : order_all) {
      if (static_cast<int>(pts.size()) >= k) break;
      if (have.count(n)) continue;
      pts.push_back(opts.grid->points[n]);
      wts.push_back((*opts.weights_full)[n]);
      have.insert(n);
    }
  }
  while (static_cast<int>(pts.size()) < k) {
    // grid exhausted (or unavailable): repeat the strongest candidate
    int strongest = 0;
    for (std::size_t i = 1; i < wts.size(); ++i)
      if (wts[i] > wts[strongest]) strongest = static_cast<int>(i);
    pts.push_back(pts[strongest]);
    wts.push_back(wts[strongest]);
  }

  Rng rng(seed);
  KmeansResult km = kmeans_weighted(pts, wts, k, rng);

  // de-duplicate near-coincident centers by relocating the lighter one to an
  // unused high-weight grid point; keeps k seeds genuinely distinct
  if (pool_available && opts.diversity_radius > 0.0 && k > 1) {
    std::vector<double> cluster_weight(k, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      cluster_weight[km.assignment[i]] += wts[i];
    std::unordered_set<int> used_repl;
    for (int guard = 0; guard < 3 * k; ++guard) {
      int a = -1, b = -1;
      double closest = opts.diversity_radius;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const double d = distance(km.centers[i], km.centers[j]);
          if (d < closest) {
            closest = d;
            a = i;
            b = j;
          }
        }
      if (a < 0) break;
      const int loser = cluster_weight[a] < cluster_weight[b] ? a : b;
      auto pick = [&](bool respect_memory) -> int {
        for (int n : window) {
          if (used_repl.count(n)) continue;
          const Pt& p = opts.grid->points[n];
          if (respect_memory && opts.memory && opts.memory->contains(p))
            continue;
          bool spaced = true;
          for (int c = 0; c < k; ++c) {
            if (c == loser) continue;
            if (distance(p, km.centers[c]) < opts.diversity_radius) {
              spaced = false;
              break;
            }
          }
          if (spaced) return n;
        }
        return -1;
      };
      int repl = pick(true);
      if (repl < 0) repl = pick(false);
      if (repl < 0) break;
      km.centers[loser] = opts.grid->points[repl];
      cluster_weight[loser] = (*opts.weights_full)[repl];
      used_repl.insert(repl);
    }
  }

  return km.centers;
}

std::vector<int> select_discard_set(const Eigen::VectorXd& s_hat, int k) {
  if (k < 0) throw std::invalid_argument("select_discard_set: k must be >= 0");
  if (s_hat.size() == 0) return {};
  const double floor = 1e-12 * std::max(s_hat.maxCoeff(), 0.0);
  std::vector<int> positive;
  for (int n = 0; n < s_hat.size(); ++n)
    if (s_hat[n] > floor && s_hat[n] > 0.0) positive.push_back(n);
  std::stable_sort(positive.begin(), positive.end(),
                   [&](int a, int b) { return s_hat[a] < s_hat[b]; });
  if (static_cast<int>(positive.size()) > k) positive.resize(k);
  return positive;
}

}  // namespace rmsl
