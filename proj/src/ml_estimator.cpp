#include "rmsl/ml_estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace rmsl {

namespace {

double log_ten_sq_200() {
  static const double c = std::log(10.0) * std::log(10.0) / 200.0;
  return c;
}

void check_inputs(const ThetaEstimate& theta, const Observation& obs) {
  if (theta.K() == 0)
    throw std::invalid_argument("nll: empty parameter block");
  if (theta.powers.size() != theta.K())
    throw std::invalid_argument("nll: power/location length mismatch");
  if (!(theta.sigma_db > 0.0))
    throw std::invalid_argument("nll: sigma must be positive");
  for (int k = 0; k < theta.K(); ++k)
    if (!(theta.powers[k] > 0.0))
      throw std::invalid_argument("nll: powers must be positive");
  if (obs.sensors.empty() || obs.sensors.size() != obs.rss.size())
    throw std::invalid_argument("nll: malformed observation");
  for (double r : obs.rss)
    if (!(r > 0.0))
      throw std::invalid_argument("nll: readings must be positive");
  if (!(obs.alpha > 0.0))
    throw std::invalid_argument("nll: alpha must be positive");
}

}  // namespace

double nll(const ThetaEstimate& theta, const Observation& obs) {
  check_inputs(theta, obs);
  const int K = theta.K();
  const double cs = log_ten_sq_200() * theta.sigma_db * theta.sigma_db;
  const double c2 = std::expm1(2.0 * cs);  // beta^2 - 1
  double f = 0.0;
  for (std::size_t m = 0; m < obs.sensors.size(); ++m) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < K; ++k) {
      const double w = clamped_distance(obs.sensors[m], theta.locations[k]);
      const double g = theta.powers[k] * std::pow(w, -obs.alpha);
      a += g;
      b += g * g;
    }
    const double s2 = std::log1p(c2 * b / (a * a));
    const double mu = cs + 2.0 * std::log(a) -
                      0.5 * std::log(a * a + c2 * b);
    const double e = std::log(obs.rss[m]) - mu;
    f += std::log(s2) + e * e / s2;
  }
  if (!std::isfinite(f)) throw std::domain_error("nll: non-finite objective");
  return f;
}

Eigen::VectorXd nll_gradient(const ThetaEstimate& theta,
                             const Observation& obs) {
  check_inputs(theta, obs);
  const int K = theta.K();
  const double sig = theta.sigma_db;
  const double c = log_ten_sq_200();
  const double cs = c * sig * sig;
  const double beta_sq = std::exp(2.0 * cs);
  const double c2 = beta_sq - 1.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * K + 1);
  std::vector<double> g(K), w(K);
  for (std::size_t m = 0; m < obs.sensors.size(); ++m) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < K; ++k) {
      w[k] = clamped_distance(obs.sensors[m], theta.locations[k]);
      g[k] = theta.powers[k] * std::pow(w[k], -obs.alpha);
      a += g[k];
      b += g[k] * g[k];
    }
    const double d_big = a * a + c2 * b;
    const double s2 = std::log1p(c2 * b / (a * a));
    const double mu = cs + 2.0 * std::log(a) - 0.5 * std::log(d_big);
    const double e = std::log(obs.rss[m]) - mu;
    // d/dx [ln s2 + e^2/s2] = s2_x (1/s2 - e^2/s2^2) - mu_x (2 e / s2)
    const double coef_s = 1.0 / s2 - e * e / (s2 * s2);
    const double coef_mu = -2.0 * e / s2;
    for (int k = 0; k < K; ++k) {
      const double q = (a + c2 * g[k]) / d_big;
      const double s2_g = 2.0 * q - 2.0 / a;
      const double mu_g = 2.0 / a - q;
      const double t = coef_s * s2_g + coef_mu * mu_g;
      grad[2 * K + k] += t * g[k] / theta.powers[k];
      const double dist = distance(obs.sensors[m], theta.locations[k]);
      if (dist > 1.0) {
        const double scale = -obs.alpha * g[k] / (w[k] * w[k]);
        grad[k] += t * scale * (theta.locations[k].u - obs.sensors[m].u);
        grad[K + k] += t * scale * (theta.locations[k].v - obs.sensors[m].v);
      }
    }
    const double s2_sig = 4.0 * c * sig * beta_sq * b / d_big;
    const double mu_sig = 2.0 * c * sig * (1.0 - beta_sq * b / d_big);
    grad[3 * K] += coef_s * s2_sig + coef_mu * mu_sig;
  }
  return grad;
}

namespace {

// Normalized-coordinate view of the box: z in [0,1]^(3K+1)
struct BoxMap {
  Eigen::VectorXd lo, hi;

  BoxMap(int K, const ThetaBounds& b) : lo(3 * K + 1), hi(3 * K + 1) {
    for (int k = 0; k < K; ++k) {
      lo[k] = 0.0;
      hi[k] = b.roi.length_l;
      lo[K + k] = 0.0;
      hi[K + k] = b.roi.width_w;
      lo[2 * K + k] = b.power_low_mw;
      hi[2 * K + k] = b.power_high_mw;
    }
    lo[3 * K] = b.sigma_low_db;
    hi[3 * K] = b.sigma_high_db;
  }

  ThetaEstimate decode(const Eigen::VectorXd& z, int K) const {
    ThetaEstimate t;
    t.locations.resize(K);
    t.powers.resize(K);
    auto coord = [&](int i) {
      double x = lo[i] + z[i] * (hi[i] - lo[i]);
      return std::min(std::max(x, lo[i]), hi[i]);
    };
    for (int k = 0; k < K; ++k) {
      t.locations[k].u = coord(k);
      t.locations[k].v = coord(K + k);
      t.powers[k] = coord(2 * K + k);
    }
    t.sigma_db = coord(3 * K);
    return t;
  }

  Eigen::VectorXd encode(const ThetaEstimate& t, int K) const {
    Eigen::VectorXd z(3 * K + 1);
    auto norm = [&](int i, double x) {
      double span = hi[i] - lo[i];
      double u = span > 0.0 ? (x - lo[i]) / span : 0.0;
      return std::min(std::max(u, 0.0), 1.0);
    };
    for (int k = 0; k < K; ++k) {
      z[k] = norm(k, t.locations[k].u);
      z[K + k] = norm(K + k, t.locations[k].v);
      z[2 * K + k] = norm(2 * K + k, t.powers[k]);
    }
    z[3 * K] = norm(3 * K, t.sigma_db);
    return z;
  }
};

Eigen::VectorXd clip01(Eigen::VectorXd z) {
  for (int i = 0; i < z.size(); ++i) z[i] = std::min(std::max(z[i], 0.0), 1.0);
  return z;
}

}  // namespace

SolveReport solve_ml(const ThetaEstimate& initial, const Observation& obs,
                     const ThetaBounds& bounds, const SolverOpts& opts) {
  if (!bounds.feasible(initial))
    throw std::invalid_argument("solve_ml: initial point violates bounds");
  const int K = initial.K();
  const int n = 3 * K + 1;
  BoxMap box(K, bounds);
  constexpr double kEdge = 1e-12;

  auto eval = [&](const Eigen::VectorXd& z) {
    return nll(box.decode(z, K), obs);
  };
  auto grad_z = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd gt = nll_gradient(box.decode(z, K), obs);
    for (int i = 0; i < n; ++i) gt[i] *= (box.hi[i] - box.lo[i]);
    return gt;
  };

  Eigen::VectorXd z = clip01(box.encode(initial, K));
  double f = eval(z);
  Eigen::VectorXd g = grad_z(z);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);

  SolveReport report;
  report.iterations = 0;
  report.converged = false;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    report.iterations = it;
    // projected gradient: ignore components pushing against an active bound
    Eigen::VectorXd pg = g;
    for (int i = 0; i < n; ++i) {
      if (z[i] <= kEdge && g[i] > 0.0) pg[i] = 0.0;
      if (z[i] >= 1.0 - kEdge && g[i] < 0.0) pg[i] = 0.0;
    }
    if (pg.lpNorm<Eigen::Infinity>() <= opts.grad_tol * (1.0 + std::abs(f))) {
      report.converged = true;
      break;
    }

    Eigen::VectorXd d = -(h * g);
    for (int i = 0; i < n; ++i) {
      if (z[i] <= kEdge && d[i] < 0.0) d[i] = 0.0;
      if (z[i] >= 1.0 - kEdge && d[i] > 0.0) d[i] = 0.0;
    }
    bool steepest = false;
    if (d.dot(g) >= 0.0 || d.lpNorm<Eigen::Infinity>() == 0.0) {
      d = -pg;
      h.setIdentity();
      steepest = true;
    }

    // backtracking line search along the projected path; acceptance also
    // enforces plain monotone descent so the output contract holds exactly
    auto search = [&](const Eigen::VectorXd& dir, Eigen::VectorXd& z_out,
                      double& f_out) {
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        Eigen::VectorXd z_try = clip01(z + t * dir);
        Eigen::VectorXd step = z_try - z;
        if (step.lpNorm<Eigen::Infinity>() == 0.0) return false;
        double f_try = eval(z_try);
        if (std::isfinite(f_try) && f_try <= f &&
            f_try <= f + 1e-4 * g.dot(step)) {
          z_out = z_try;
          f_out = f_try;
          return true;
        }
      }
      return false;
    };

    Eigen::VectorXd z_new;
    double f_new = f;
    bool ok = search(d, z_new, f_new);
    if (!ok && !steepest) {
      d = -pg;
      h.setIdentity();
      ok = search(d, z_new, f_new);
    }
    if (!ok) break;  // numerical floor: no acceptable descent step

    Eigen::VectorXd s = z_new - z;
    Eigen::VectorXd g_new = grad_z(z_new);
    if (s.lpNorm<Eigen::Infinity>() <= opts.step_tol) {
      z = z_new;
      f = f_new;
      report.converged = true;
      break;
    }
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      // inverse BFGS update; skipped when s'y is too small to be reliable
      const double rho = 1.0 / sy;
      Eigen::VectorXd hy = h * y;
      h -= rho * (s * hy.transpose() + hy * s.transpose());
      h += rho * (1.0 + rho * y.dot(hy)) * (s * s.transpose());
    }
    z = z_new;
    f = f_new;
    g = g_new;
  }

  report.theta = box.decode(z, K);
  report.objective = f;
  return report;
}

}  // namespace rmsl
