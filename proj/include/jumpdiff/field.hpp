#pragma once

#include <complex>
#include <span>
#include <vector>

#include "jumpdiff/grid.hpp"

namespace jumpdiff {

// Values on a uniform time mesh t_k = k*T/K, k = 0..K, over a spatial grid.
// Level k occupies the contiguous block [k*N, (k+1)*N), N = grid.total_points().
struct SpaceTimeField {
  GridSpec grid;
  int steps = 0;      // K
  double t_final = 0; // T
  std::vector<std::complex<double>> values;

  SpaceTimeField() = default;
  SpaceTimeField(const GridSpec& g, int k, double T)
      : grid(g), steps(k), t_final(T), values(static_cast<std::size_t>(k + 1) * g.total_points()) {
    if (k < 1) throw std::invalid_argument("field: need at least one time step");
    if (!(T > 0.0)) throw std::invalid_argument("field: final time must be positive");
  }

  double dt() const { return t_final / steps; }
  double time(int k) const { return t_final * k / steps; }
  long points() const { return grid.total_points(); }

  std::span<std::complex<double>> level(int k) {
    return {values.data() + static_cast<std::size_t>(k) * points(), static_cast<std::size_t>(points())};
  }
  std::span<const std::complex<double>> level(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * points(), static_cast<std::size_t>(points())};
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double max_imag() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
  }
};

// Real part of one time level at an off-grid point, multilinear with
// periodic wrap-around.
inline double interpolate_level(const SpaceTimeField& field, int level,
                                std::span<const double> y) {
  const GridSpec& g = field.grid;
  const int m = g.points_per_axis;
  const double h = g.step();
  long base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < g.dim; ++i) {
    double fi = (y[static_cast<std::size_t>(i)] + g.half_extent) / h;
    fi = std::fmod(fi, static_cast<double>(m));
    if (fi < 0.0) fi += m;
    if (fi >= m) fi = 0.0;
    const double fl = std::floor(fi);
    base[i] = static_cast<long>(fl);
    frac[i] = fi - fl;
    if (base[i] >= m) {
      base[i] = 0;
      frac[i] = 0.0;
    }
  }
  const auto values = field.level(level);
  double acc = 0.0;
  for (int c = 0; c < (1 << g.dim); ++c) {
    double w = 1.0;
    std::array<int, 3> idx{0, 0, 0};
    for (int i = 0; i < g.dim; ++i) {
      const int bit = (c >> i) & 1;
      w *= bit ? frac[i] : 1.0 - frac[i];
      long k = base[i] + bit;
      if (k >= m) k -= m;
      idx[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
    acc += w * values[static_cast<std::size_t>(g.flatten(idx))].real();
  }
  return acc;
}

}  // namespace jumpdiff
