#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace jumpdiff {

// Right-open step function on [knot_0, inf): value_i on [knot_i, knot_{i+1}),
// the last value extending forever. knot_0 is normally 0.
class PiecewiseConstant {
 public:
  PiecewiseConstant() : knots_{0.0}, values_{1.0} {}
  PiecewiseConstant(std::vector<double> knots, std::vector<double> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.empty() || knots_.size() != values_.size())
      throw std::invalid_argument("piecewise: knots and values must match and be nonempty");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (knots_[i] <= knots_[i - 1])
        throw std::invalid_argument("piecewise: knots must be strictly increasing");
  }
  static PiecewiseConstant constant(double v) { return PiecewiseConstant({0.0}, {v}); }

  double operator()(double t) const { return values_[segment(t)]; }

  // Exact integral over [s, t], s <= t.
  double integrate(double s, double t) const {
    if (t < s) throw std::invalid_argument("piecewise: integration bounds out of order");
    double acc = 0.0;
    std::size_t i = segment(s);
    double left = s;
    while (true) {
      double right = (i + 1 < knots_.size()) ? knots_[i + 1] : t;
      if (right >= t) {
        acc += (t - left) * values_[i];
        break;
      }
      acc += (right - left) * values_[i];
      left = right;
      ++i;
    }
    return acc;
  }

  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  // Breakpoints strictly inside (s, t), for exact per-piece splitting.
  std::vector<double> breakpoints_within(double s, double t) const {
    std::vector<double> r;
    for (double k : knots_)
      if (k > s && k < t) r.push_back(k);
    return r;
  }

 private:
  std::size_t segment(double t) const {
    if (t < knots_.front()) return 0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
  }

  std::vector<double> knots_;
  std::vector<double> values_;
};

}  // namespace jumpdiff
