#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rmsl/geometry.hpp"

namespace rmsl {

// Joint parameter block: K source positions, K transmit powers (mW), and the
// shared shadowing std dev (dB).
struct ThetaEstimate {
  std::vector<Pt> locations;
  Eigen::VectorXd powers;
  double sigma_db = 0.0;

  int K() const { return static_cast<int>(locations.size()); }
};

struct ThetaBounds {
  Roi roi;
  double power_low_mw = 2000.0;
  double power_high_mw = 4000.0;
  double sigma_low_db = 0.5;
  double sigma_high_db = 14.0;

  bool feasible(const ThetaEstimate& t) const {
    if (t.powers.size() != t.K()) return false;
    for (const Pt& p : t.locations)
      if (!roi.contains(p)) return false;
    for (int k = 0; k < t.K(); ++k)
      if (t.powers[k] < power_low_mw || t.powers[k] > power_high_mw)
        return false;
    return t.sigma_db >= sigma_low_db && t.sigma_db <= sigma_high_db;
  }
};

}  // namespace rmsl
