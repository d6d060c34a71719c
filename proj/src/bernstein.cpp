#include "jumpdiff/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jumpdiff {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// alpha (alpha-1) ... (alpha-n+1)
double falling(double alpha, int n) {
  double r = 1.0;
  for (int j = 0; j < n; ++j) r *= alpha - j;
  return r;
}

// d^n/dl^n of l^a log(1+l)^b for n <= 2 (b may be negative).
double power_log_deriv(int n, double a, double b, double l) {
  double L = std::log1p(l);
  double Lb = std::pow(L, b);
  double v = std::pow(l, a);
  if (n == 0) return v * Lb;
  double inv1 = 1.0 / (1.0 + l);
  if (n == 1) return a * std::pow(l, a - 1.0) * Lb + b * v * std::pow(L, b - 1.0) * inv1;
  // n == 2
  return a * (a - 1.0) * std::pow(l, a - 2.0) * Lb +
         2.0 * a * b * std::pow(l, a - 1.0) * std::pow(L, b - 1.0) * inv1 +
         b * (b - 1.0) * v * std::pow(L, b - 2.0) * inv1 * inv1 -
         b * v * std::pow(L, b - 1.0) * inv1 * inv1;
}

// d^n/dl^n of l / log(1+l^(b/2)) for n <= 2.
double log_ratio_deriv(int n, double b, double l) {
  double u = std::pow(l, 0.5 * b);
  double g = std::log1p(u);
  if (n == 0) return l / g;
  double gp = 0.5 * b * std::pow(l, 0.5 * b - 1.0) / (1.0 + u);
  if (n == 1) return 1.0 / g - l * gp / (g * g);
  double gpp = 0.5 * b * std::pow(l, 0.5 * b - 2.0) * ((0.5 * b - 1.0) - u) / ((1.0 + u) * (1.0 + u));
  return -2.0 * gp / (g * g) - l * gpp / (g * g) + 2.0 * l * gp * gp / (g * g * g);
}

}  // namespace

Bernstein Bernstein::stable(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "stable: alpha must lie in (0, 1]");
  Bernstein s;
  s.kind_ = Kind::Stable;
  s.a_ = alpha;
  s.delta_lo_ = s.delta_hi_ = alpha;
  return s;
}

Bernstein Bernstein::sum_stable(double beta, double alpha) {
  require(0.0 < beta && beta < alpha && alpha < 1.0, "sum_stable: need 0 < beta < alpha < 1");
  Bernstein s;
  s.kind_ = Kind::SumStable;
  s.a_ = alpha;
  s.b_ = beta;
  s.delta_lo_ = beta;
  s.delta_hi_ = alpha;
  return s;
}

Bernstein Bernstein::log_plus(double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0 && beta < 1.0 - alpha, "log_plus: need 0 < beta < 1 - alpha");
  Bernstein s;
  s.kind_ = Kind::LogPlus;
  s.a_ = alpha;
  s.b_ = beta;
  s.delta_lo_ = alpha;
  s.delta_hi_ = alpha + beta;
  return s;
}

Bernstein Bernstein::log_minus(double alpha, double beta) {
  require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < alpha,
          "log_minus: need 0 < beta < alpha < 1");
  Bernstein s;
  s.kind_ = Kind::LogMinus;
  s.a_ = alpha;
  s.b_ = beta;
  s.delta_lo_ = alpha - beta;
  s.delta_hi_ = alpha;
  return s;
}

Bernstein Bernstein::relativistic(double alpha, double m) {
  require(alpha > 0.0 && alpha < 1.0 && m > 0.0, "relativistic: need alpha in (0,1), m > 0");
  Bernstein s;
  s.kind_ = Kind::Relativistic;
  s.a_ = alpha;
  s.b_ = m;
  s.shift_ = std::pow(m, 1.0 / alpha);
  s.delta_lo_ = alpha;
  s.delta_hi_ = 1.0;  // linear near zero, order alpha at infinity
  return s;
}

Bernstein Bernstein::linear() {
  Bernstein s;
  s.kind_ = Kind::Linear;
  s.delta_lo_ = s.delta_hi_ = 1.0;
  return s;
}

Bernstein Bernstein::log_ratio(double beta) {
  require(beta > 0.0 && beta < 2.0, "log_ratio: need beta in (0, 2)");
  Bernstein s;
  s.kind_ = Kind::LogRatio;
  s.a_ = beta;
  s.delta_lo_ = 1.0 - 0.5 * beta;
  s.delta_hi_ = 1.0;
  return s;
}

Bernstein Bernstein::tabulated(std::vector<double> lambdas, std::vector<double> values,
                               double delta_lo, double delta_hi) {
  require(lambdas.size() == values.size() && lambdas.size() >= 2,
          "tabulated: need at least two samples");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] > 0.0 && values[i] > 0.0, "tabulated: samples must be positive");
    if (i > 0) {
      require(lambdas[i] > lambdas[i - 1], "tabulated: lambdas must be strictly increasing");
      require(values[i] >= values[i - 1], "tabulated: values must be nondecreasing");
    }
  }
  require(delta_lo > 0.0 && delta_hi >= delta_lo, "tabulated: bad declared exponents");
  Bernstein s;
  s.kind_ = Kind::Tabulated;
  s.delta_lo_ = delta_lo;
  s.delta_hi_ = delta_hi;
  s.tab_lambda_ = std::move(lambdas);
  s.tab_value_ = std::move(values);
  return s;
}

double Bernstein::eval_tabulated(double lambda) const {
  if (lambda < tab_lambda_.front() || lambda > tab_lambda_.back())
    throw std::out_of_range("tabulated spec: lambda outside covered range");
  auto it = std::upper_bound(tab_lambda_.begin(), tab_lambda_.end(), lambda);
  std::size_t hi = std::min<std::size_t>(tab_lambda_.size() - 1,
                                         static_cast<std::size_t>(it - tab_lambda_.begin()));
  if (hi == 0) hi = 1;
  std::size_t lo = hi - 1;
  double t = (std::log(lambda) - std::log(tab_lambda_[lo])) /
             (std::log(tab_lambda_[hi]) - std::log(tab_lambda_[lo]));
  return std::exp((1.0 - t) * std::log(tab_value_[lo]) + t * std::log(tab_value_[hi]));
}

double Bernstein::operator()(double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error("phi: lambda must be positive");
  switch (kind_) {
    case Kind::Stable:
      return std::pow(lambda, a_);
    case Kind::SumStable:
      return std::pow(lambda, b_) + std::pow(lambda, a_);
    case Kind::LogPlus:
      return power_log_deriv(0, a_, b_, lambda);
    case Kind::LogMinus:
      return power_log_deriv(0, a_, -b_, lambda);
    case Kind::Relativistic:
      return std::pow(lambda + shift_, a_) - b_;
    case Kind::Linear:
      return lambda;
    case Kind::LogRatio:
      return log_ratio_deriv(0, a_, lambda);
    case Kind::Tabulated:
      return eval_tabulated(lambda);
  }
  return 0.0;
}

int Bernstein::max_derivative_order() const {
  switch (kind_) {
    case Kind::Stable:
    case Kind::SumStable:
    case Kind::Relativistic:
    case Kind::Linear:
      return 6;
    default:
      return 2;
  }
}

double Bernstein::derivative(int n, double lambda) const {
  if (n < 0) throw std::invalid_argument("derivative: order must be nonnegative");
  if (n == 0) return (*this)(lambda);
  if (n > max_derivative_order())
    throw std::invalid_argument("derivative: order " + std::to_string(n) +
                                " exceeds the supported cap for this kind");
  if (!(lambda > 0.0)) throw std::domain_error("derivative: lambda must be positive");
  switch (kind_) {
    case Kind::Stable:
      return falling(a_, n) * std::pow(lambda, a_ - n);
    case Kind::SumStable:
      return falling(b_, n) * std::pow(lambda, b_ - n) + falling(a_, n) * std::pow(lambda, a_ - n);
    case Kind::LogPlus:
      return power_log_deriv(n, a_, b_, lambda);
    case Kind::LogMinus:
      return power_log_deriv(n, a_, -b_, lambda);
    case Kind::Relativistic:
      return falling(a_, n) * std::pow(lambda + shift_, a_ - n);
    case Kind::Linear:
      return n == 1 ? 1.0 : 0.0;
    case Kind::LogRatio:
      return log_ratio_deriv(n, a_, lambda);
    case Kind::Tabulated: {
      double h = 1e-5 * lambda;
      if (n == 1) return (eval_tabulated(lambda + h) - eval_tabulated(lambda - h)) / (2.0 * h);
      return (eval_tabulated(lambda + h) - 2.0 * eval_tabulated(lambda) + eval_tabulated(lambda - h)) /
             (h * h);
    }
  }
  return 0.0;
}

double Bernstein::inverse(double t) const {
  if (!(t > 0.0)) throw std::domain_error("inverse: t must be positive");
  switch (kind_) {
    case Kind::Stable:
      return std::pow(t, 1.0 / a_);
    case Kind::Linear:
      return t;
    case Kind::Relativistic:
      return std::pow(t + b_, 1.0 / a_) - shift_;
    case Kind::Tabulated:
      if (t < tab_value_.front() || t > tab_value_.back())
        throw std::out_of_range("tabulated spec: t outside covered value range");
      break;
    default:
      break;
  }
  // Bracketing bisection on the log axis.
  double lo = 1.0, hi = 1.0;
  if (kind_ == Kind::Tabulated) {
    lo = tab_lambda_.front();
    hi = tab_lambda_.back();
  } else {
    while ((*this)(hi) < t) {
      hi *= 4.0;
      if (hi > 1e300) throw std::domain_error("inverse: t beyond reachable range");
    }
    while ((*this)(lo) >= t) {
      lo /= 4.0;
      if (lo < 1e-300) return 0.0;
    }
  }
  for (int it = 0; it < 200; ++it) {
    double mid = std::sqrt(lo * hi);
    if ((*this)(mid) >= t)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return hi;
}

std::string Bernstein::label() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind_) {
    case Kind::Stable:
      os << "stable{" << a_ << "}";
      break;
    case Kind::SumStable:
      os << "sum_stable{" << b_ << "," << a_ << "}";
      break;
    case Kind::LogPlus:
      os << "log_plus{" << a_ << "," << b_ << "}";
      break;
    case Kind::LogMinus:
      os << "log_minus{" << a_ << "," << b_ << "}";
      break;
    case Kind::Relativistic:
      os << "relativistic{" << a_ << "," << b_ << "}";
      break;
    case Kind::Linear:
      os << "linear";
      break;
    case Kind::LogRatio:
      os << "log_ratio{" << a_ << "}";
      break;
    case Kind::Tabulated:
      os << "tabulated[" << tab_lambda_.size() << "]";
      break;
  }
  return os.str();
}

}  // namespace jumpdiff
