#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jumpdiff {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Grid cannot resolve the requested multiplier; carries the smallest adequate
// power-of-two points_per_axis.
struct ResolutionError : std::runtime_error {
  int required_points_per_axis;
  ResolutionError(const std::string& msg, int required)
      : std::runtime_error(msg), required_points_per_axis(required) {}
};

// Spatial/temporal truncation too small; carries a suggested replacement.
struct TruncationError : std::runtime_error {
  double suggested_truncation;
  TruncationError(const std::string& msg, double suggested)
      : std::runtime_error(msg), suggested_truncation(suggested) {}
};

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature failed to settle within its refinement budget.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtrapolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic reduction: recursive pairwise summation, order independent of
// any threading used to fill the buffer.
double pairwise_sum(std::span<const double> v);

// Runs body(i) for i in [0, n) on a small worker pool. Work items must write
// only to their own slots; the schedule never affects results.
void parallel_for(long n, const std::function<void(long)>& body, int threads = 0);

// Adaptive Simpson for complex integrands, relative tolerance on the total.
std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double rel_tol,
                                        int max_depth = 40);

// floor(d/2) + 1: highest multiplier-derivative order the estimates consume.
inline int derivative_order_cap(int dim) { return dim / 2 + 1; }

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace jumpdiff
