#include "jumpdiff/symbols.hpp"

#include <algorithm>
#include <cmath>

#include "jumpdiff/rng.hpp"

namespace jumpdiff {

namespace {

using Cplx = std::complex<double>;

double norm2(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return s;
}

double sinc(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace

void Symbol::check_order(double s, double t) const {
  if (t < s) throw std::invalid_argument("symbol: accumulation interval out of order (s > t)");
}

Cplx Symbol::accumulated(double s, double t, std::span<const double> xi) const {
  check_order(s, t);
  if (s == t) return {0.0, 0.0};
  return integrate_adaptive([&](double r) { return psi(r, xi); }, s, t, 1e-10);
}

namespace {

class SbmSymbol final : public Symbol {
 public:
  SbmSymbol(Bernstein phi, PiecewiseConstant sigma, int dim)
      : phi_(std::move(phi)), sigma_(std::move(sigma)), dim_(dim) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
    if (sigma_.min_value() <= 0.0) throw std::invalid_argument("sbm symbol: sigma must be positive");
  }

  int dim() const override { return dim_; }

  Cplx psi(double t, std::span<const double> xi) const override {
    double lam = norm2(xi);
    if (lam == 0.0) return {0.0, 0.0};
    double s = sigma_(t);
    return {-phi_(s * s * lam), 0.0};
  }

  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    check_order(s, t);
    double lam = norm2(xi);
    if (s == t || lam == 0.0) return {0.0, 0.0};
    double acc = 0.0;
    double left = s;
    for (double k : sigma_.breakpoints_within(s, t)) {
      double sig = sigma_(left);
      acc += (k - left) * phi_(sig * sig * lam);
      left = k;
    }
    double sig = sigma_(left);
    acc += (t - left) * phi_(sig * sig * lam);
    return {-acc, 0.0};
  }

  bool exact_accumulation() const override { return true; }
  const Bernstein* reference_phi() const override { return &phi_; }

  double declared_delta1() const override {
    double smin = sigma_.min_value();
    if (smin >= 1.0) return 1.0;
    return std::pow(smin * smin, phi_.delta_hi()) / phi_.n_hi();
  }

  std::string label() const override { return "sbm{" + phi_.label() + "}"; }

 private:
  Bernstein phi_;
  PiecewiseConstant sigma_;
  int dim_;
};

class ClockSymbol final : public Symbol {
 public:
  ClockSymbol(Bernstein phi, PiecewiseConstant a, int dim)
      : phi_(std::move(phi)), a_(std::move(a)), dim_(dim) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
    if (a_.min_value() <= 0.0) throw std::invalid_argument("clock symbol: a must be positive");
  }

  int dim() const override { return dim_; }

  Cplx psi(double t, std::span<const double> xi) const override {
    double lam = norm2(xi);
    if (lam == 0.0) return {0.0, 0.0};
    return {-a_(t) * phi_(lam), 0.0};
  }

  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    check_order(s, t);
    double lam = norm2(xi);
    if (s == t || lam == 0.0) return {0.0, 0.0};
    return {-a_.integrate(s, t) * phi_(lam), 0.0};
  }

  bool exact_accumulation() const override { return true; }
  const Bernstein* reference_phi() const override { return &phi_; }
  double declared_delta1() const override { return a_.min_value(); }
  std::string label() const override { return "clock{" + phi_.label() + "}"; }

 private:
  Bernstein phi_;
  PiecewiseConstant a_;
  int dim_;
};

class AnisotropicSymbol final : public Symbol {
 public:
  AnisotropicSymbol(double alpha, PiecewiseConstant a, int dim)
      : alpha_(alpha), a_(std::move(a)), dim_(dim), phi_(Bernstein::stable(alpha / 2.0)) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
    if (!(alpha > 0.0 && alpha < 2.0))
      throw std::invalid_argument("anisotropic symbol: alpha must lie in (0, 2)");
  }

  int dim() const override { return dim_; }

  Cplx psi(double t, std::span<const double> xi) const override {
    double s = 0.0;
    for (double v : xi) s += std::pow(std::abs(v), alpha_);
    return {-a_(t) * s, 0.0};
  }

  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    check_order(s, t);
    if (s == t) return {0.0, 0.0};
    double sum = 0.0;
    for (double v : xi) sum += std::pow(std::abs(v), alpha_);
    return {-a_.integrate(s, t) * sum, 0.0};
  }

  bool exact_accumulation() const override { return true; }
  // phi(|xi|^2) = |xi|^alpha; the coordinate sum dominates it for alpha < 2.
  const Bernstein* reference_phi() const override { return &phi_; }
  double declared_delta1() const override { return a_.min_value(); }
  std::string label() const override { return "anisotropic{alpha=" + std::to_string(alpha_) + "}"; }

 private:
  double alpha_;
  PiecewiseConstant a_;
  int dim_;
  Bernstein phi_;
};

class DriftSymbol final : public Symbol {
 public:
  DriftSymbol(std::vector<PiecewiseConstant> rate, int dim) : rate_(std::move(rate)), dim_(dim) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
    if (static_cast<int>(rate_.size()) != dim_)
      throw std::invalid_argument("drift symbol: one rate component per coordinate");
  }

  int dim() const override { return dim_; }

  Cplx psi(double t, std::span<const double> xi) const override {
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += rate_[i](t) * xi[i];
    return {0.0, dot};
  }

  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    check_order(s, t);
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += rate_[i].integrate(s, t) * xi[i];
    return {0.0, dot};
  }

  bool exact_accumulation() const override { return true; }
  std::string label() const override { return "drift"; }

 private:
  std::vector<PiecewiseConstant> rate_;
  int dim_;
};

class CompoundPoissonSymbol final : public Symbol {
 public:
  CompoundPoissonSymbol(double rate, double half_width, int dim)
      : rate_(rate), half_width_(half_width), dim_(dim) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
    if (!(rate > 0.0) || !(half_width > 0.0))
      throw std::invalid_argument("compound poisson symbol: rate and jump width must be positive");
  }

  int dim() const override { return dim_; }

  Cplx psi(double, std::span<const double> xi) const override {
    double jhat = 1.0;
    for (int i = 0; i < dim_; ++i) jhat *= sinc(half_width_ * xi[i]);
    return {rate_ * (jhat - 1.0), 0.0};
  }

  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    check_order(s, t);
    return (t - s) * psi(0.0, xi);
  }

  bool exact_accumulation() const override { return true; }
  std::string label() const override { return "cpoisson"; }

  double rate() const { return rate_; }
  double half_width() const { return half_width_; }

 private:
  double rate_, half_width_;
  int dim_;
};

class SumSymbol final : public Symbol {
 public:
  SumSymbol(SymbolPtr a, SymbolPtr b) : a_(std::move(a)), b_(std::move(b)) {
    if (!a_ || !b_) throw std::invalid_argument("sum symbol: null component");
    if (a_->dim() != b_->dim()) throw std::invalid_argument("sum symbol: dimension mismatch");
  }

  int dim() const override { return a_->dim(); }
  Cplx psi(double t, std::span<const double> xi) const override {
    return a_->psi(t, xi) + b_->psi(t, xi);
  }
  Cplx accumulated(double s, double t, std::span<const double> xi) const override {
    return a_->accumulated(s, t, xi) + b_->accumulated(s, t, xi);
  }
  bool exact_accumulation() const override {
    return a_->exact_accumulation() && b_->exact_accumulation();
  }
  const Bernstein* reference_phi() const override { return a_->reference_phi(); }
  double declared_delta1() const override {
    // The second component may destroy no ellipticity: Re Psi_b <= 0 for every
    // family here, so the first component's constant survives.
    return a_->declared_delta1();
  }
  std::string label() const override { return a_->label() + "+" + b_->label(); }

 private:
  SymbolPtr a_, b_;
};

class CustomSymbol final : public Symbol {
 public:
  CustomSymbol(int dim, std::function<Cplx(double, std::span<const double>)> f, std::string label,
               std::optional<Bernstein> ref, double delta1)
      : dim_(dim), f_(std::move(f)), label_(std::move(label)), ref_(std::move(ref)), delta1_(delta1) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("symbol: dim must be 1, 2, or 3");
  }

  int dim() const override { return dim_; }
  Cplx psi(double t, std::span<const double> xi) const override { return f_(t, xi); }
  const Bernstein* reference_phi() const override { return ref_ ? &*ref_ : nullptr; }
  double declared_delta1() const override { return delta1_; }
  std::string label() const override { return label_; }

 private:
  int dim_;
  std::function<Cplx(double, std::span<const double>)> f_;
  std::string label_;
  std::optional<Bernstein> ref_;
  double delta1_;
};

}  // namespace

SymbolPtr make_sbm_symbol(Bernstein phi, PiecewiseConstant sigma, int dim) {
  return std::make_shared<SbmSymbol>(std::move(phi), std::move(sigma), dim);
}
SymbolPtr make_clock_symbol(Bernstein phi, PiecewiseConstant a, int dim) {
  return std::make_shared<ClockSymbol>(std::move(phi), std::move(a), dim);
}
SymbolPtr make_anisotropic_symbol(double alpha, PiecewiseConstant a, int dim) {
  return std::make_shared<AnisotropicSymbol>(alpha, std::move(a), dim);
}
SymbolPtr make_drift_symbol(std::vector<PiecewiseConstant> rate, int dim) {
  return std::make_shared<DriftSymbol>(std::move(rate), dim);
}
SymbolPtr make_compound_poisson_symbol(double rate, double jump_half_width, int dim) {
  return std::make_shared<CompoundPoissonSymbol>(rate, jump_half_width, dim);
}
SymbolPtr make_sum_symbol(SymbolPtr a, SymbolPtr b) {
  return std::make_shared<SumSymbol>(std::move(a), std::move(b));
}
SymbolPtr make_custom_symbol(int dim,
                             std::function<Cplx(double, std::span<const double>)> psi,
                             std::string label, std::optional<Bernstein> reference,
                             double declared_delta1) {
  return std::make_shared<CustomSymbol>(dim, std::move(psi), std::move(label), std::move(reference),
                                        declared_delta1);
}

BernsteinReport verify_bernstein_conditions(const Bernstein& spec, double lambda_min,
                                            double lambda_max, int per_decade, double slack) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min))
    throw std::invalid_argument("bernstein audit: bad lambda range");
  double decades = std::log10(lambda_max / lambda_min);
  if (decades < 8.0 - 1e-9 || per_decade < 64)
    throw std::invalid_argument("bernstein audit: grid must span >= 8 decades at >= 64 points per decade");

  int n = static_cast<int>(std::lround(decades * per_decade)) + 1;
  std::vector<double> lam(n), val(n);
  double lstep = std::log(lambda_max / lambda_min) / (n - 1);
  for (int i = 0; i < n; ++i) {
    lam[i] = lambda_min * std::exp(i * lstep);
    val[i] = spec(lam[i]);
  }

  BernsteinReport rep;
  rep.spec = spec.label();
  rep.declared_delta_lo = spec.delta_lo();
  rep.declared_delta_hi = spec.delta_hi();
  rep.positive = true;
  rep.monotone = true;
  for (int i = 0; i < n; ++i) {
    rep.positive = rep.positive && val[i] > 0.0;
    if (i > 0 && val[i] < val[i - 1] * (1.0 - 1e-12)) rep.monotone = false;
  }

  double slope_min = 1e300, slope_max = -1e300;
  double n2 = 1e300, n3 = 0.0;
  bool linear_ok = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dl = std::log(lam[j] / lam[i]);
      double dv = std::log(val[j] / val[i]);
      double slope = dv / dl;
      slope_min = std::min(slope_min, slope);
      slope_max = std::max(slope_max, slope);
      double ratio = val[j] / val[i];
      double arg = lam[j] / lam[i];
      n2 = std::min(n2, ratio / std::pow(arg, spec.delta_lo()));
      n3 = std::max(n3, ratio / std::pow(arg, spec.delta_hi()));
      if (ratio > arg * (1.0 + 1e-9)) linear_ok = false;
    }
  }
  rep.fitted_delta_lo = slope_min;
  rep.fitted_delta_hi = slope_max;
  rep.fitted_n2 = n2;
  rep.fitted_n3 = n3;
  rep.ratio_linear_bound_ok = linear_ok;

  double n4 = 0.0;
  rep.rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    BernsteinAuditRow row;
    row.lambda = lam[i];
    row.phi = val[i];
    row.dphi1 = spec.derivative(1, lam[i]);
    row.dphi2 = spec.derivative(2, lam[i]);
    n4 = std::max(n4, std::abs(row.dphi1) * lam[i] / val[i]);
    n4 = std::max(n4, std::abs(row.dphi2) * lam[i] * lam[i] / val[i]);
    rep.rows.push_back(row);
  }
  rep.fitted_n4 = n4;

  rep.scaling_ok = (spec.delta_lo() - slack <= slope_min) && (slope_max <= spec.delta_hi() + slack);
  rep.pass = rep.positive && rep.monotone && rep.scaling_ok;
  return rep;
}

namespace {

// Central differences for multi-index derivatives up to order 2.
Cplx fd_derivative(const Symbol& sym, double t, std::span<const double> xi, int i, int j,
                   double rel_step) {
  int d = sym.dim();
  std::vector<double> p(xi.begin(), xi.end());
  double mag = std::sqrt(norm2(xi));
  double hi = rel_step * mag, hj = rel_step * mag;
  auto at = [&](double di, double dj) {
    p.assign(xi.begin(), xi.end());
    p[i] += di;
    p[j] += dj;
    return sym.psi(t, std::span<const double>(p.data(), d));
  };
  if (j < 0) {  // first derivative along i
    return (at(hi, 0.0) - at(-hi, 0.0)) / (2.0 * hi);
  }
  if (i == j) {
    return (at(hi, 0.0) - 2.0 * sym.psi(t, xi) + at(-hi, 0.0)) / (hi * hi);
  }
  return (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4.0 * hi * hj);
}

}  // namespace

SymbolConditionReport verify_symbol_conditions(const Symbol& symbol, const Bernstein* phi,
                                               const SymbolAuditOptions& opts) {
  const Bernstein* ref = phi ? phi : symbol.reference_phi();
  if (!ref) throw ConfigurationError("symbol audit: no reference modulus available");
  int d = symbol.dim();
  int d0 = derivative_order_cap(d);

  // Direction set: canonical axes, the main diagonal, and seeded random
  // directions. Axis directions are essential: symbols that are merely
  // elliptic but not smooth blow up exactly there.
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  if (d > 1) {
    std::vector<double> diag(d, 1.0 / std::sqrt(static_cast<double>(d)));
    dirs.push_back(diag);
    Rng rng(opts.seed);
    for (int k = 0; k < opts.random_directions; ++k) {
      std::vector<double> v(d);
      double nn = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = rng.normal();
        nn += v[i] * v[i];
      }
      nn = std::sqrt(nn);
      for (int i = 0; i < d; ++i) v[i] /= nn;
      dirs.push_back(v);
    }
  }

  double decades = std::log10(opts.mag_max / opts.mag_min);
  int nmag = static_cast<int>(std::lround(decades * opts.per_decade)) + 1;
  double lstep = std::log(opts.mag_max / opts.mag_min) / (nmag - 1);

  SymbolConditionReport rep;
  rep.symbol = symbol.label();
  rep.declared_delta1 = symbol.declared_delta1();
  rep.derivative_order = d0;
  rep.n1_cap = opts.n1_cap;
  double d1 = 1e300, n1 = 0.0;

  std::vector<double> xi(d);
  for (double t : opts.times) {
    for (int im = 0; im < nmag; ++im) {
      double mag = opts.mag_min * std::exp(im * lstep);
      double row_ell = 1e300, row_grow = 0.0;
      for (const auto& dir : dirs) {
        for (int i = 0; i < d; ++i) xi[i] = mag * dir[i];
        double lam = norm2(std::span<const double>(xi.data(), d));
        double phival = (*ref)(lam);
        Cplx p = symbol.psi(t, std::span<const double>(xi.data(), d));
        double ell = -p.real() / phival;
        row_ell = std::min(row_ell, ell);
        // |alpha| = 1
        for (int i = 0; i < d; ++i) {
          double g = std::abs(fd_derivative(symbol, t, std::span<const double>(xi.data(), d), i, -1,
                                            opts.fd_rel_step));
          row_grow = std::max(row_grow, g * mag / phival);
        }
        if (d0 >= 2) {
          for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
              double g = std::abs(fd_derivative(symbol, t, std::span<const double>(xi.data(), d), i,
                                                j, opts.fd_rel_step));
              row_grow = std::max(row_grow, g * mag * mag / phival);
            }
        }
      }
      d1 = std::min(d1, row_ell);
      n1 = std::max(n1, row_grow);
      rep.rows.push_back({t, mag, row_ell, row_grow});
    }
  }

  rep.delta1_fit = d1;
  rep.n1_fit = n1;
  rep.ellipticity_ok = d1 > 0.0 && d1 >= rep.declared_delta1 * (1.0 - opts.slack);
  rep.growth_ok = n1 <= opts.n1_cap;
  rep.pass = rep.ellipticity_ok && rep.growth_ok;
  return rep;
}

}  // namespace jumpdiff
