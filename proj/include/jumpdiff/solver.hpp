#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jumpdiff/bernstein.hpp"
#include "jumpdiff/field.hpp"
#include "jumpdiff/symbols.hpp"

namespace jumpdiff {

// Duhamel solution of du/dt = Psi(t, iD) u + f, u(0) = 0, per frequency mode:
//   uhat_{k+1} = e^{Phi(t_k, t_{k+1}, xi)} uhat_k
//              + dt * phi1(Phi) * (fhat_k + fhat_{k+1}) / 2,
// phi1(z) = (e^z - 1)/z. The propagator uses the exact accumulated exponent;
// the source is frozen to its step average, which keeps the scheme second
// order. Throws InstabilityError when Re Phi > 1e-8 on any mode.
SpaceTimeField solve(const Symbol& symbol, const SpaceTimeField& f);

// Per-level spectral multiplier application; m receives the level time.
SpaceTimeField apply_multiplier(
    const SpaceTimeField& field,
    const std::function<std::complex<double>(double, std::span<const double>)>& m);

// m(t, xi) = phi(|xi|^2).
SpaceTimeField apply_phi_multiplier(const SpaceTimeField& field, const Bernstein& phi);
// m(t, xi) = Psi(t, xi), i.e. the generator action.
SpaceTimeField apply_symbol_multiplier(const SpaceTimeField& field, const Symbol& symbol);

// (sum over all time levels and grid points of |v|^p h^d dt)^(1/p).
double lp_space_time_norm(const SpaceTimeField& field, double p);

struct NormReport {
  double p = 2.0;
  double u_norm = 0.0;      // ||u||_{L_p}
  double phi_u_norm = 0.0;  // ||phi(Delta)u||_{L_p}
  double ratio_to_source = 0.0;

  double h_phi_norm() const { return u_norm + phi_u_norm; }
};

NormReport phi_potential_norm(const SpaceTimeField& u, const Bernstein& phi, double p);

struct WeakResidualOptions {
  int scales = 3;
  int centers = 5;
  std::uint64_t seed = 0x7e57;
};

// max over a family of smooth compactly supported bumps zeta of
//   |<u, zeta_t> + <u, A* zeta> + <f, zeta>| / (||zeta|| (||u|| + ||f||)),
// A* the conjugate-symbol multiplier. Zero fields give zero.
double weak_residual(const SpaceTimeField& u, const SpaceTimeField& f, const Symbol& symbol,
                     const WeakResidualOptions& opts = {});

struct EstimateOptions {
  double t_final = 1.0;
  double half_extent = kPi;  // integer frequencies: band-limits survive refinement
  int band = 8;              // largest |k| per axis in the sources
  int modes = 12;
  int n_sources = 4;
  std::uint64_t seed = 20260822;
};

struct EstimateRow {
  int source = 0;
  double p = 0.0;
  int m = 0;  // points per axis; time steps match
  double f_norm = 0.0, u_norm = 0.0, phi_u_norm = 0.0;
  double ratio = 0.0;  // phi_u_norm / f_norm
};

struct EstimateSummaryRow {
  double p = 0.0;
  int m = 0;
  double max_ratio = 0.0;
};

struct EstimateTable {
  std::vector<EstimateRow> rows;
  std::vector<EstimateSummaryRow> summary;
};

// Solves the equation for seeded band-limited sources over a resolution ladder
// and tabulates ||phi(Delta)u||_p / ||f||_p. Sources are closed-form trigono-
// metric polynomials, so every ladder level samples the same function.
EstimateTable estimate_ratio_harness(const Symbol& symbol, const Bernstein& phi,
                                     std::span<const double> p_list, std::span<const int> ladder,
                                     const EstimateOptions& opts = {});

}  // namespace jumpdiff
