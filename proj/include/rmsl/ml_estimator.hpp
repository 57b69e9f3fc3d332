#pragma once

#include <Eigen/Dense>

#include "rmsl/scene.hpp"
#include "rmsl/theta.hpp"

namespace rmsl {

struct SolverOpts {
  int max_iterations = 200;
  double grad_tol = 1e-6;   // on the projected gradient, scaled by 1+|f|
  double step_tol = 1e-8;   // infinity norm in normalized coordinates
};

struct SolveReport {
  ThetaEstimate theta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Negative log-likelihood of the log-RSS readings under the moment-matched
// log-normal model: sum_m [ ln s_m^2 + (ln r_m - mu_m)^2 / s_m^2 ], constant
// terms dropped.  Throws std::invalid_argument on nonpositive readings or a
// degenerate parameter block (sigma_db = 0 gives s_m^2 = 0).
double nll(const ThetaEstimate& theta, const Observation& obs);

// Analytic gradient, length 3K+1, ordered [u_1..u_K, v_1..v_K, P_1..P_K,
// sigma].  Position entries are zero wherever the 1 m distance clamp is
// active (the model is locally flat there).
Eigen::VectorXd nll_gradient(const ThetaEstimate& theta,
                             const Observation& obs);

// Box-constrained quasi-Newton descent from `initial` (must be feasible,
// else std::invalid_argument).  The returned objective never exceeds the
// initial one, and the returned block always satisfies the bounds exactly.
SolveReport solve_ml(const ThetaEstimate& initial, const Observation& obs,
                     const ThetaBounds& bounds, const SolverOpts& opts = {});

}  // namespace rmsl
