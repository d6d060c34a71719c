#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "jumpdiff/common.hpp"

namespace jumpdiff {

// Uniform spatial grid on the torus [-L, L)^d with M points per axis.
// Physical nodes x_j = -L + j*(2L/M); frequency nodes xi_k = (pi/L)*k with
// k in [-M/2, M/2) stored in DFT order (k and k - M share a bucket).
struct GridSpec {
  int dim = 1;
  double half_extent = 1.0;   // L
  int points_per_axis = 16;   // M, power of two

  GridSpec() = default;
  GridSpec(int d, double L, int M) : dim(d), half_extent(L), points_per_axis(M) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2, or 3");
    if (!(half_extent > 0.0)) throw std::invalid_argument("grid: half extent must be positive");
    if (points_per_axis < 16 || !is_power_of_two(points_per_axis))
      throw std::invalid_argument("grid: points per axis must be a power of two, at least 16");
  }

  double step() const { return 2.0 * half_extent / points_per_axis; }
  double freq_step() const { return kPi / half_extent; }
  double nyquist() const { return freq_step() * (points_per_axis / 2); }
  long total_points() const {
    long t = 1;
    for (int i = 0; i < dim; ++i) t *= points_per_axis;
    return t;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= step();
    return v;
  }

  // Signed index for DFT bucket k on one axis.
  int signed_index(int k) const { return k < points_per_axis / 2 ? k : k - points_per_axis; }
  double coordinate(int j) const { return -half_extent + j * step(); }
  double frequency(int k) const { return freq_step() * signed_index(k); }

  void unflatten(long flat, std::array<int, 3>& idx) const {
    idx = {0, 0, 0};
    for (int k = dim - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(flat % points_per_axis);
      flat /= points_per_axis;
    }
  }
  long flatten(const std::array<int, 3>& idx) const {
    long f = 0;
    for (int k = 0; k < dim; ++k) f = f * points_per_axis + idx[k];
    return f;
  }
  void frequency_at(long flat, std::array<double, 3>& xi) const {
    std::array<int, 3> idx;
    unflatten(flat, idx);
    xi = {0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) xi[k] = frequency(idx[k]);
  }
  void coordinate_at(long flat, std::array<double, 3>& x) const {
    std::array<int, 3> idx;
    unflatten(flat, idx);
    x = {0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) x[k] = coordinate(idx[k]);
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && half_extent == o.half_extent && points_per_axis == o.points_per_axis;
  }
};

}  // namespace jumpdiff
