#pragma once

#include <vector>

#include "rmsl/geometry.hpp"
#include "rmsl/theta.hpp"

namespace rmsl {

struct SumMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct LogNormalParams {
  double mu = 0.0;       // mean of ln(sum)
  double sigma_sq = 0.0; // variance of ln(sum)
};

// Bias factor linking a dB-domain normal to the mean of its linear-scale
// log-normal: exp((ln 10)^2 sigma_db^2 / 200).  Equals 1 at sigma_db = 0.
double beta_factor(double sigma_db);

// Exact first two moments of sum_k P_k d_k^-alpha 10^(xi_k/10) with
// independent xi_k ~ N(0, sigma_db^2).  Throws std::invalid_argument on
// empty/mismatched inputs, nonpositive powers or distances, or negative sigma.
SumMoments sum_moments(const std::vector<double>& powers_mw,
                       const std::vector<double>& distances,
                       double alpha, double sigma_db);

// Log-normal whose linear mean/variance match the given moments (moment
// matching).  Round-trips: exp(mu + sigma_sq/2) reproduces the mean.  For a
// single term the match is exact, not an approximation.
LogNormalParams fw_match(const SumMoments& moments);

// Per-sensor log-RSS moments predicted by a parameter block; distances are
// clamped at 1 m exactly as in the forward model.
LogNormalParams predicted_log_moments(const ThetaEstimate& theta,
                                      const Pt& sensor, double alpha);

}  // namespace rmsl
