#include "rmsl/fenton_wilkinson.hpp"

#include <cstdio>

#include "rmsl/random.hpp"
#include "test_util.hpp"

using namespace rmsl;

static void test_beta_factor() {
  CHECK(beta_factor(0.0) == 1.0);
  // closed form at sigma = 6 dB
  const double c = std::log(10.0) * std::log(10.0) / 200.0;
  CHECK_REL(beta_factor(6.0), std::exp(c * 36.0), 1e-15);
  CHECK_NEAR(beta_factor(6.0), 2.5969603369, 1e-6);
  CHECK(beta_factor(12.0) > beta_factor(6.0));
  CHECK_THROWS(beta_factor(-1.0), std::invalid_argument);

  // beta is the mean of 10^(xi/10): verify against a large sample
  Rng rng(4);
  const int n = 2000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += std::pow(10.0, 6.0 * rng.normal() / 10.0);
  CHECK_REL(acc / n, beta_factor(6.0), 0.01);
}

static void test_sum_moments() {
  // single noiseless term
  SumMoments m = sum_moments({100.0}, {10.0}, 2.0, 0.0);
  CHECK_REL(m.mean, 1.0, 1e-15);
  CHECK(m.variance == 0.0);

  CHECK_THROWS(sum_moments({}, {}, 2.5, 6.0), std::invalid_argument);
  CHECK_THROWS(sum_moments({1.0}, {1.0, 2.0}, 2.5, 6.0), std::invalid_argument);
  CHECK_THROWS(sum_moments({-1.0}, {1.0}, 2.5, 6.0), std::invalid_argument);
  CHECK_THROWS(sum_moments({1.0}, {0.0}, 2.5, 6.0), std::invalid_argument);
  CHECK_THROWS(sum_moments({1.0}, {1.0}, 2.5, -2.0), std::invalid_argument);

  // additivity in the power terms: ordering never matters
  SumMoments ab = sum_moments({2000.0, 3000.0}, {50.0, 120.0}, 2.5, 5.0);
  SumMoments ba = sum_moments({3000.0, 2000.0}, {120.0, 50.0}, 2.5, 5.0);
  CHECK(ab.mean == ba.mean);
  CHECK(ab.variance == ba.variance);

  // three-term moments against monte carlo
  const std::vector<double> P = {2500.0, 3200.0, 2100.0};
  const std::vector<double> D = {80.0, 300.0, 650.0};
  const double sigma = 6.0;
  SumMoments mm = sum_moments(P, D, 2.5, sigma);
  Rng rng(12);
  const int n = 2000000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int k = 0; k < 3; ++k)
      r += P[k] * std::pow(D[k], -2.5) *
           std::pow(10.0, sigma * rng.normal() / 10.0);
    acc += r;
    acc2 += r * r;
  }
  const double mean_mc = acc / n;
  const double var_mc = acc2 / n - mean_mc * mean_mc;
  CHECK_REL(mean_mc, mm.mean, 0.02);
  CHECK_REL(var_mc, mm.variance, 0.05);
}

static void test_fw_match() {
  // degenerate: no variance collapses to a point mass in the log domain
  LogNormalParams p = fw_match({5.0, 0.0});
  CHECK_REL(p.mu, std::log(5.0), 1e-15);
  CHECK(p.sigma_sq == 0.0);

  // round trip: matched parameters reproduce the linear moments
  LogNormalParams q = fw_match({10.0, 300.0});
  CHECK_REL(std::exp(q.mu + q.sigma_sq / 2.0), 10.0, 1e-12);
  const double var_back =
      std::expm1(q.sigma_sq) * std::exp(2.0 * q.mu + q.sigma_sq);
  CHECK_REL(var_back, 300.0, 1e-12);

  CHECK_THROWS(fw_match({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS(fw_match({-2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS(fw_match({1.0, -1.0}), std::invalid_argument);
}

static void test_single_term_exactness() {
  // for one source the matched log-normal IS the true distribution:
  // mu = ln(P d^-alpha), sigma_sq = (ln 10)^2 sigma_db^2 / 100
  Rng rng(21);
  double worst_mu = 0.0, worst_s2 = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double P = rng.uniform(2000.0, 4000.0);
    const double d = rng.uniform(1.0, 3000.0);
    const double sigma = rng.uniform(0.1, 12.0);
    LogNormalParams lp = fw_match(sum_moments({P}, {d}, 2.5, sigma));
    const double mu_true = std::log(P * std::pow(d, -2.5));
    const double s2_true =
        std::log(10.0) * std::log(10.0) * sigma * sigma / 100.0;
    if (std::abs(mu_true) > 0.01)
      worst_mu = std::max(worst_mu,
                          std::abs(lp.mu - mu_true) / std::abs(mu_true));
    worst_s2 =
        std::max(worst_s2, std::abs(lp.sigma_sq - s2_true) / s2_true);
  }
  CHECK(worst_mu <= 1e-12);
  CHECK(worst_s2 <= 1e-12);
}

static void test_variance_cap_invariant() {
  // mixing terms only reduces log-variance: sigma_m^2 never exceeds the
  // single-term value (ln 10)^2 sigma_db^2 / 100
  Rng rng(33);
  for (int t = 0; t < 300; ++t) {
    const int K = 1 + static_cast<int>(rng.index(5));
    std::vector<double> P(K), D(K);
    for (int k = 0; k < K; ++k) {
      P[k] = rng.uniform(2000.0, 4000.0);
      D[k] = rng.uniform(1.0, 2500.0);
    }
    const double sigma = rng.uniform(0.5, 12.0);
    LogNormalParams lp = fw_match(sum_moments(P, D, 2.5, sigma));
    const double cap =
        std::log(10.0) * std::log(10.0) * sigma * sigma / 100.0;
    CHECK(lp.sigma_sq > 0.0);
    CHECK(lp.sigma_sq <= cap * (1.0 + 1e-12));
    if (!(lp.sigma_sq > 0.0 && lp.sigma_sq <= cap * (1.0 + 1e-12))) return;
  }
}

static void test_predicted_log_moments() {
  // sensor on top of the source: distance clamps to 1, mu = ln(P)
  ThetaEstimate th;
  th.locations = {{500.0, 500.0}};
  th.powers = Eigen::VectorXd::Constant(1, 3000.0);
  th.sigma_db = 4.0;
  LogNormalParams at = predicted_log_moments(th, {500.0, 500.0}, 2.5);
  CHECK_REL(at.mu, std::log(3000.0), 1e-12);

  // equals the two-stage computation on a multi-source block
  ThetaEstimate th3;
  th3.locations = {{100.0, 200.0}, {1500.0, 300.0}, {900.0, 1800.0}};
  th3.powers = Eigen::VectorXd::Zero(3);
  th3.powers << 2500.0, 3900.0, 2100.0;
  th3.sigma_db = 7.0;
  const Pt sensor{800.0, 700.0};
  LogNormalParams lp = predicted_log_moments(th3, sensor, 2.5);
  std::vector<double> P(3), D(3);
  for (int k = 0; k < 3; ++k) {
    P[k] = th3.powers[k];
    D[k] = clamped_distance(sensor, th3.locations[k]);
  }
  LogNormalParams two_stage = fw_match(sum_moments(P, D, 2.5, 7.0));
  CHECK(lp.mu == two_stage.mu);
  CHECK(lp.sigma_sq == two_stage.sigma_sq);

  // scaling all powers by c shifts mu by ln(c) and leaves sigma_sq alone
  ThetaEstimate scaled = th3;
  scaled.powers *= 8.0;
  LogNormalParams lp8 = predicted_log_moments(scaled, sensor, 2.5);
  CHECK_REL(lp8.mu, lp.mu + std::log(8.0), 1e-12);
  CHECK_REL(lp8.sigma_sq, lp.sigma_sq, 1e-12);
}

int main() {
  test_beta_factor();
  test_sum_moments();
  test_fw_match();
  test_single_term_exactness();
  test_variance_cap_invariant();
  test_predicted_log_moments();
  return testutil::summary("test_fw");
}
