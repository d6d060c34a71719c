#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumpdiff/bernstein.hpp"
#include "jumpdiff/piecewise.hpp"

namespace jumpdiff {

// Time-dependent Fourier multiplier Psi(t, xi) of a process with independent
// increments, together with its accumulated exponent
//   Phi(s, t, xi) = int_s^t Psi(r, xi) dr,
// so that exp(Phi(s,t,xi)) is both the increment characteristic function and
// the propagator of the evolution it generates.
class Symbol {
 public:
  virtual ~Symbol() = default;

  virtual int dim() const = 0;
  virtual std::complex<double> psi(double t, std::span<const double> xi) const = 0;

  // Exact per-piece accumulation where the family supports it, adaptive
  // quadrature (1e-10 relative) otherwise. s <= t enforced.
  virtual std::complex<double> accumulated(double s, double t, std::span<const double> xi) const;
  virtual bool exact_accumulation() const { return false; }

  // Reference modulus for the ellipticity/growth audit; null when the symbol
  // carries none (then audits must be given one explicitly).
  virtual const Bernstein* reference_phi() const { return nullptr; }
  // Declared ellipticity: Re[-Psi(t,xi)] >= delta1 * phi(|xi|^2).
  virtual double declared_delta1() const { return 0.0; }
  virtual std::string label() const = 0;

 protected:
  void check_order(double s, double t) const;
};

using SymbolPtr = std::shared_ptr<const Symbol>;

// -Psi(t, xi) = phi((sigma(t) |xi|)^2): subordinate Brownian motion with a
// piecewise-constant spatial modulation.
SymbolPtr make_sbm_symbol(Bernstein phi, PiecewiseConstant sigma, int dim);

// Psi(t, xi) = -a(t) phi(|xi|^2): time-changed (additive clock) generator.
SymbolPtr make_clock_symbol(Bernstein phi, PiecewiseConstant a, int dim);

// Psi(t, xi) = -a(t) sum_i |xi_i|^alpha. Elliptic but not smooth away from
// the axes; negative control for the derivative-growth audit.
SymbolPtr make_anisotropic_symbol(double alpha, PiecewiseConstant a, int dim);

// Psi(t, xi) = i b(t) . xi, deterministic drift.
SymbolPtr make_drift_symbol(std::vector<PiecewiseConstant> rate, int dim);

// Psi(t, xi) = rate * (jhat(xi) - 1) with jumps uniform on [-R, R]^d,
// jhat(xi) = prod_i sinc(R xi_i).
SymbolPtr make_compound_poisson_symbol(double rate, double jump_half_width, int dim);

// Psi = Psi_a + Psi_b (independent components).
SymbolPtr make_sum_symbol(SymbolPtr a, SymbolPtr b);

// Arbitrary evaluator; accumulation by quadrature.
SymbolPtr make_custom_symbol(int dim,
                             std::function<std::complex<double>(double, std::span<const double>)> psi,
                             std::string label, std::optional<Bernstein> reference = std::nullopt,
                             double declared_delta1 = 0.0);

// ---- audits ----------------------------------------------------------------

struct BernsteinAuditRow {
  double lambda = 0.0, phi = 0.0, dphi1 = 0.0, dphi2 = 0.0;
};

struct BernsteinReport {
  std::string spec;
  double declared_delta_lo = 0.0, declared_delta_hi = 0.0;
  double fitted_delta_lo = 0.0, fitted_delta_hi = 0.0;
  double fitted_n2 = 0.0, fitted_n3 = 0.0, fitted_n4 = 0.0;
  bool monotone = false;
  bool positive = false;
  bool ratio_linear_bound_ok = false;  // phi(l2)/phi(l1) <= l2/l1 where claimed
  bool scaling_ok = false;
  bool pass = false;
  std::vector<BernsteinAuditRow> rows;
};

// Pairwise log-slope fit over a geometric grid (>= 8 decades, >= 64 points per
// decade by default); pass iff the declared exponents sandwich the fitted ones
// within `slack` and the structural flags hold.
BernsteinReport verify_bernstein_conditions(const Bernstein& spec, double lambda_min = 1e-4,
                                            double lambda_max = 1e4, int per_decade = 64,
                                            double slack = 0.05);

struct SymbolAuditOptions {
  double mag_min = 1e-3, mag_max = 1e3;
  int per_decade = 8;
  int random_directions = 32;  // per magnitude, dim >= 2 (axes always included)
  std::vector<double> times = {0.0, 0.5, 1.5};
  double fd_rel_step = 1e-4;
  double n1_cap = 1e3;
  double slack = 0.05;
  std::uint64_t seed = 0x5eedULL;
};

struct SymbolConditionRow {
  double t = 0.0, mag = 0.0;
  double ellipticity_ratio = 0.0;  // Re[-Psi] / phi(|xi|^2)
  double growth_ratio = 0.0;       // max over |a| <= d0 of |D^a Psi| |xi|^|a| / phi(|xi|^2)
};

struct SymbolConditionReport {
  std::string symbol;
  double declared_delta1 = 0.0;
  double delta1_fit = 0.0;
  double n1_fit = 0.0;
  double n1_cap = 0.0;
  int derivative_order = 0;  // d0
  bool ellipticity_ok = false;
  bool growth_ok = false;
  bool pass = false;
  std::vector<SymbolConditionRow> rows;
};

// Finite-difference audit of the ellipticity and derivative-growth conditions
// against phi (the symbol's reference if `phi` is null).
SymbolConditionReport verify_symbol_conditions(const Symbol& symbol, const Bernstein* phi = nullptr,
                                               const SymbolAuditOptions& opts = {});

}  // namespace jumpdiff
