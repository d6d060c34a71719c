#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "jumpdiff/common.hpp"

namespace jumpdiff {

// mt19937_64 driven, with hand-rolled variate transforms so that streams are
// reproducible across standard libraries. Per-path streams are derived from a
// master seed and the path index (splitmix64 of the pair), which keeps results
// independent of worker count and scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1): never returns 0 or 1.
  double uniform() {
    while (true) {
      double u = (engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0 && u < 1.0) return u;
    }
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double exponential() { return -std::log(uniform()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double c = std::cos(2.0 * kPi * v), s = std::sin(2.0 * kPi * v);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  // Knuth multiplication method; adequate for the small means used here.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    long n = -1;
    double prod = 1.0;
    do {
      ++n;
      prod *= uniform();
    } while (prod > limit);
    return n;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace jumpdiff
