#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpdiff/bernstein.hpp"
#include "jumpdiff/field.hpp"
#include "jumpdiff/piecewise.hpp"
#include "jumpdiff/rng.hpp"
#include "jumpdiff/symbols.hpp"

namespace jumpdiff {

// One increment of a driftless subordinator with Laplace exponent
// phi(lambda) = lambda^alpha over a time step dt, alpha in (0, 1).
// Kanter's representation; exact in distribution, one uniform + one
// exponential draw per call.
double sample_stable_subordinator(double alpha, double dt, Rng& rng);

// A simulatable process whose increments match one of the library's symbol
// families. The subordinator part is restricted to Laplace exponents we can
// sample exactly: phi stable (alpha in (0,1)) or linear (Brownian motion,
// per-coordinate variance 2t).
struct Process {
  enum class Base { SbmModulated, AdditiveClock };

  Base base = Base::SbmModulated;
  Bernstein phi = Bernstein::stable(0.5);
  // sigma(t) for SbmModulated, the clock rate a(t) for AdditiveClock.
  PiecewiseConstant modulation = PiecewiseConstant::constant(1.0);
  int dim = 1;
  // Optional independent additive parts.
  std::vector<PiecewiseConstant> drift;  // empty or one rate per coordinate
  double cp_rate = 0.0;                  // compound Poisson intensity, 0 = off
  double cp_jump_half_width = 0.0;       // jumps uniform on [-w, w]^d
  std::string id = "process";
};

Process make_sbm_process(Bernstein phi, PiecewiseConstant sigma, int dim,
                         std::string id = "sbm");
Process make_clock_process(Bernstein phi, PiecewiseConstant a, int dim,
                           std::string id = "clock");
Process with_drift(Process p, std::vector<PiecewiseConstant> drift);
Process with_compound_poisson(Process p, double rate, double jump_half_width);

// The symbol whose accumulated exponent is the log-CF of this process's
// increments.
SymbolPtr process_symbol(const Process& process);

// X_t - X_s, one draw. Modulated pieces are split exactly at the knots of
// sigma so each piece sees a constant factor.
std::vector<double> sample_increment(const Process& process, double s, double t,
                                     Rng& rng);

struct CfEstimate {
  std::complex<double> value;
  double std_error = 0.0;  // conservative bound 1/sqrt(n)
};

// Mean of exp(i xi . X) over the sample rows; pairwise-summed so the result
// does not depend on how the samples were produced in parallel.
CfEstimate empirical_cf(std::span<const std::vector<double>> samples,
                        std::span<const double> xi);

struct CfRow {
  double s = 0.0;
  double t = 0.0;
  std::vector<double> xi;
  std::complex<double> empirical;
  std::complex<double> oracle;
  double normalized_dev = 0.0;  // |empirical - oracle| / (3 n^{-1/2} + 1e-12)
};

struct CfReport {
  std::vector<CfRow> rows;
  long n_samples = 0;
  double max_dev = 0.0;
  double within_fraction = 0.0;  // fraction of rows with normalized_dev <= 1
  bool pass = false;             // within_fraction >= 0.99
};

// Draws n increments per (s, t) pair and compares the empirical CF against
// exp(Phi(s, t, xi)) at every listed frequency. A dimension mismatch between
// process and symbol is a configuration error; a statistical mismatch is a
// failed report.
CfReport verify_cf(const Process& process, const Symbol& symbol,
                   std::span<const std::pair<double, double>> pairs,
                   std::span<const std::vector<double>> xis, long n,
                   std::uint64_t seed);

struct McResult {
  std::vector<double> values;
  std::vector<double> std_errors;
  long n_paths = 0;
};

// Monte Carlo value of the Duhamel integral: u(t, x) = integral over s in
// [0, t] of E f(s, x + X_t - X_s) ds, using the trapezoid rule on f's own
// time mesh and multilinear interpolation on its periodic spatial grid.
// t must lie on the mesh; evaluation points must lie inside the grid box.
// Path p uses the stream derived from (seed, p), so results are independent
// of worker count.
McResult mc_solution(const Process& process, const SpaceTimeField& f, double t,
                     std::span<const std::vector<double>> points, long n_paths,
                     std::uint64_t seed);

}  // namespace jumpdiff
