#pragma once

#include <cmath>

namespace rmsl {

struct Pt {
  double u = 0.0;
  double v = 0.0;
};

// Rectangular deployment region [0,l] x [0,w] in meters.
struct Roi {
  double length_l = 0.0;
  double width_w = 0.0;

  double area() const { return length_l * width_w; }
  bool contains(const Pt& p) const {
    return p.u >= 0.0 && p.u <= length_l && p.v >= 0.0 && p.v <= width_w;
  }
};

inline double distance(const Pt& a, const Pt& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

// Propagation distances below 1 m are clamped so the d^-alpha term stays
// bounded; the same rule is used on both the simulation and estimation side.
inline double clamped_distance(const Pt& a, const Pt& b) {
  return std::max(distance(a, b), 1.0);
}

}  // namespace rmsl
