#include "rmsl/fenton_wilkinson.hpp"

#include <cmath>
#include <stdexcept>

namespace rmsl {

namespace {
// (ln 10)^2 / 200; beta = exp(c * sigma_db^2)
double log_ten_sq_200() {
  static const double c = std::log(10.0) * std::log(10.0) / 200.0;
  return c;
}
}  // namespace

double beta_factor(double sigma_db) {
  if (sigma_db < 0.0)
    throw std::invalid_argument("beta_factor: sigma must be nonnegative");
  return std::exp(log_ten_sq_200() * sigma_db * sigma_db);
}

SumMoments sum_moments(const std::vector<double>& powers_mw,
                       const std::vector<double>& distances,
                       double alpha, double sigma_db) {
  if (powers_mw.empty() || powers_mw.size() != distances.size())
    throw std::invalid_argument("sum_moments: need matching nonempty inputs");
  if (!(alpha > 0.0))
    throw std::invalid_argument("sum_moments: alpha must be positive");
  if (sigma_db < 0.0)
    throw std::invalid_argument("sum_moments: sigma must be nonnegative");
  double a = 0.0;  // sum of mean path terms
  double b = 0.0;  // sum of squared path terms
  for (std::size_t k = 0; k < powers_mw.size(); ++k) {
    if (!(powers_mw[k] > 0.0))
      throw std::invalid_argument("sum_moments: powers must be positive");
    if (!(distances[k] > 0.0))
      throw std::invalid_argument("sum_moments: distances must be positive");
    const double g = powers_mw[k] * std::pow(distances[k], -alpha);
    a += g;
    b += g * g;
  }
  const double c = log_ten_sq_200() * sigma_db * sigma_db;
  SumMoments out;
  out.mean = std::exp(c) * a;
  // var = beta^2 (beta^2 - 1) * b; expm1 keeps the sigma -> 0 limit exact
  out.variance = std::exp(2.0 * c) * std::expm1(2.0 * c) * b;
  return out;
}

LogNormalParams fw_match(const SumMoments& moments) {
  if (!(moments.mean > 0.0))
    throw std::invalid_argument("fw_match: mean must be positive");
  if (moments.variance < 0.0)
    throw std::invalid_argument("fw_match: variance must be nonnegative");
  // mu = 2 ln E - (1/2) ln(E^2 + V), sigma^2 = ln(E^2 + V) - 2 ln E,
  // rewritten through log1p(V/E^2) so the V=0 and single-term cases are exact
  const double ratio = moments.variance / (moments.mean * moments.mean);
  LogNormalParams p;
  p.sigma_sq = std::log1p(ratio);
  p.mu = std::log(moments.mean) - 0.5 * p.sigma_sq;
  return p;
}

LogNormalParams predicted_log_moments(const ThetaEstimate& theta,
                                      const Pt& sensor, double alpha) {
  if (theta.K() == 0)
    throw std::invalid_argument("predicted_log_moments: empty parameter block");
  if (theta.powers.size() != theta.K())
    throw std::invalid_argument("predicted_log_moments: power/location mismatch");
  std::vector<double> powers(theta.K());
  std::vector<double> dists(theta.K());
  for (int k = 0; k < theta.K(); ++k) {
    powers[k] = theta.powers[k];
    dists[k] = clamped_distance(sensor, theta.locations[k]);
  }
  return fw_match(sum_moments(powers, dists, alpha, theta.sigma_db));
}

}  // namespace rmsl
