#pragma once

#include <string>
#include <vector>

#include "jumpdiff/common.hpp"

namespace jumpdiff {

// Nondecreasing positive functions on (0,inf) used both as subordinator Laplace
// exponents and as the scaling moduli of the estimates. Closed-form families:
//
//   stable        l^a                      0 < a < 1 (a = 1 allowed, = linear)
//   sum_stable    l^b + l^a                0 < b < a < 1
//   log_plus      l^a log(1+l)^b           0 < b < 1-a
//   log_minus     l^a log(1+l)^-b          0 < b < a
//   relativistic  (l + m^(1/a))^a - m      0 < a < 1, m > 0
//   linear        l
//   log_ratio     l / log(1+l^(b/2))       0 < b < 2
//
// plus a tabulated kind (log-log linear interpolation between samples).
// Each spec declares two-sided power scaling exponents delta_lo <= delta_hi
// with prefactors n_lo, n_hi:
//   n_lo (l2/l1)^delta_lo <= phi(l2)/phi(l1) <= n_hi (l2/l1)^delta_hi,  l1 <= l2.
class Bernstein {
 public:
  enum class Kind { Stable, SumStable, LogPlus, LogMinus, Relativistic, Linear, LogRatio, Tabulated };

  static Bernstein stable(double alpha);
  static Bernstein sum_stable(double beta, double alpha);
  static Bernstein log_plus(double alpha, double beta);
  static Bernstein log_minus(double alpha, double beta);
  static Bernstein relativistic(double alpha, double m);
  static Bernstein linear();
  static Bernstein log_ratio(double beta);
  // Samples must have strictly increasing lambdas and nondecreasing positive
  // values; the declared scaling exponents are the caller's claim.
  static Bernstein tabulated(std::vector<double> lambdas, std::vector<double> values,
                             double delta_lo, double delta_hi);

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }

  // Value at lambda > 0 (domain error otherwise; range error outside a table).
  double operator()(double lambda) const;
  // d^n/dl^n, n >= 0. Closed forms except Tabulated (centered differences,
  // h = 1e-5 * lambda). Orders above max_derivative_order() are refused.
  double derivative(int n, double lambda) const;
  int max_derivative_order() const;
  // Generalized inverse inf{s >= 0 : phi(s) >= t}, t > 0. Closed form where
  // available, otherwise bracketing bisection to 1e-12 relative.
  double inverse(double t) const;
  // Limit phi(0+); zero for every closed-form kind here.
  double at_zero() const { return 0.0; }

  double delta_lo() const { return delta_lo_; }
  double delta_hi() const { return delta_hi_; }
  double n_lo() const { return 1.0; }
  double n_hi() const { return 1.0; }
  // True for the closed-form kinds (complete monotonicity of the derivative is
  // a structural fact there); tabulated data carries no such guarantee.
  bool genuinely_bernstein() const { return kind_ != Kind::Tabulated; }

  std::string label() const;

 private:
  Bernstein() = default;
  double eval_tabulated(double lambda) const;

  Kind kind_ = Kind::Linear;
  double a_ = 1.0;  // alpha (or beta for log_ratio)
  double b_ = 0.0;  // beta / m
  double shift_ = 0.0;  // relativistic: m^(1/alpha)
  double delta_lo_ = 1.0, delta_hi_ = 1.0;
  std::vector<double> tab_lambda_, tab_value_;
};

}  // namespace jumpdiff
