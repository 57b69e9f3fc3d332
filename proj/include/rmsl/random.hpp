#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace rmsl {

// splitmix64 finalizer; good avalanche, cheap, and stable across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent child seed from (master, stream, index).  Every
// consumer of randomness gets its own derived seed, so adding or reordering
// consumers never perturbs the draws seen by the others.  Streams in use:
//   0 = scene geometry, 1 = shadowing draws, 2 = algorithm-internal choices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = mix64(z);
  z += 0x9E3779B97F4A7C15ull * (index + 1);
  return mix64(z);
}

// mt19937_64 with hand-rolled uniform/normal transforms.  The standard
// distributions are implementation-defined, which would break byte-identical
// outputs across toolchains; these transforms are pinned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on (0,1]; never returns 0 so log() is always finite
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller, second variate cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  // index in [0, n)
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
    // rejection-free modulo is fine here; n is tiny compared to 2^64
    return static_cast<std::size_t>(eng_() % n);
  }

  // weighted draw without replacement; weights must be nonnegative with a
  // positive sum over the remaining pool
  std::vector<std::size_t> weighted_sample_without_replacement(
      const std::vector<double>& weights, std::size_t count) {
    if (count > weights.size())
      throw std::invalid_argument("weighted sample: count exceeds pool");
    std::vector<double> w = weights;
    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t draw = 0; draw < count; ++draw) {
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0))
        throw std::invalid_argument("weighted sample: nonpositive total weight");
      double t = uniform() * total;
      std::size_t chosen = w.size() - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (t <= acc && w[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      picked.push_back(chosen);
      w[chosen] = 0.0;
    }
    return picked;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rmsl
