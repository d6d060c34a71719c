#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumpdiff/field.hpp"
#include "jumpdiff/grid.hpp"
#include "jumpdiff/symbols.hpp"

namespace jumpdiff {

// a_tau = (psi^{-1}(1/tau))^{1/2}: the spatial scale matched to a time lapse
// tau by the modulus psi. varphi(tau) := 1/a_tau converts lapses to distances.
double scaling_factor(const Bernstein& psi, double tau);
double inverse_modulus(const Bernstein& psi, double tau);  // 1 / a_tau

enum class KernelWhich { P, PsiDeltaP, Q1, Q2, Q3 };

std::string kernel_which_name(KernelWhich w);

// One transition-kernel snapshot on a spatial grid. For P/PsiDeltaP the values
// sample p(s,t,x) resp. psi(Delta)p(s,t,x); for Q1/Q2/Q3 they sample the
// rescaled kernels
//   q1 = (t-s) F^{-1}[ psi(|a xi|^2) e^{Phi(s,t,a xi)} ],
//   q2 = (t-s) F^{-1}[ i xi_axis psi(|a xi|^2) e^{Phi(s,t,a xi)} ],
//   q3 = (t-s)^2 F^{-1}[ Psi(t,a xi) psi(|a xi|^2) e^{Phi(s,t,a xi)} ],
// with a = a_{t-s}, which satisfy
//   (t-s) a^{-d}   psi(Delta)p      (s,t, x/a) = q1(s,t,x),
//   (t-s) a^{-d-1} psi(Delta)p_{x^l}(s,t, x/a) = q2_l(s,t,x),
//   (t-s)^2 a^{-d} d/dt psi(Delta)p(s,t, x/a) = q3(s,t,x).
struct KernelSnapshot {
  GridSpec grid;
  double s = 0.0, t = 0.0;
  KernelWhich which = KernelWhich::P;
  int axis = 0;
  double scaling = 1.0;  // a_{t-s} (1 when no psi is involved)
  std::string symbol;
  std::vector<std::complex<double>> values;

  double mass() const;  // real-part integral; equals the multiplier at xi = 0
  double max_abs() const;
  double max_imag() const;
};

// Inverse transform of the multiplier on the frequency grid. Requires the
// multiplier modulus to fall below 1e-12 on the outer frequency shell;
// otherwise throws ResolutionError carrying the smallest adequate M.
// psi may be null for which = P.
KernelSnapshot compute_kernel(const Symbol& symbol, const Bernstein* psi, double s, double t,
                              const GridSpec& grid, KernelWhich which, int axis = 0);

struct ScaledKernels {
  KernelSnapshot q1;
  std::vector<KernelSnapshot> q2;  // one per axis
  KernelSnapshot q3;
};

ScaledKernels compute_scaled_kernels(const Symbol& symbol, const Bernstein& psi, double s, double t,
                                     const GridSpec& grid);

// Sorted radial decomposition of |snapshot| for O(log) tail lookups:
// tail(u) = integral of |q| over |x| >= u (grid part) and a Cauchy-Schwarz cap
// for the mass outside the box, driven by the delta-weighted norm.
class RadialProfile {
 public:
  RadialProfile(const KernelSnapshot& snap, double delta);
  double tail(double radius) const;          // grid part only
  double outside_box_bound() const;          // estimated mass beyond the box
  // Estimated true mass beyond `radius` that tail(radius) misses: the
  // beyond-box extrapolation, damped by the observed octave ratio once the
  // radius itself leaves the box.
  double unresolved_beyond(double radius) const;
  double octave_ratio() const { return octave_g_; }
  double weighted_norm() const { return weighted_norm_; }
  double total() const;                      // full |q| integral over the grid
  double max_radius() const { return max_radius_; }
  double face() const { return face_; }
  double delta() const { return delta_; }

 private:
  std::vector<double> radius_;
  std::vector<double> suffix_abs_;  // suffix sums of |q| * cell volume
  double weighted_norm_ = 0.0;
  double max_radius_ = 0.0;
  double face_ = 0.0;  // box face distance (grid half extent)
  double delta_ = 0.0;
  double corners_ = 0.0;   // grid mass at radii beyond the face
  double extrap_ = 0.0;    // geometric estimate of the mass beyond the grid
  double octave_g_ = 0.9;  // observed mass ratio between adjacent outer octaves
  int dim_ = 1;
};

struct KernelBoundsRow {
  double s = 0.0, t = 0.0, scaling = 0.0;
  double sup_q1 = 0.0, sup_q2 = 0.0, sup_q3 = 0.0;
  double w_q1 = 0.0, w_q2 = 0.0, w_q3 = 0.0;  // delta-weighted L2 norms
};

struct KernelBoundsReport {
  double delta = 0.0;
  double sup_bound = 0.0;      // fitted uniform bound over all pairs/kernels
  double weighted_bound = 0.0;
  std::vector<KernelBoundsRow> rows;
  // Same quantities at doubled resolution (M -> 2M) and doubled box
  // (L -> 2L, M -> 2M) for the worst pair.
  double sup_refined = 0.0;
  double weighted_refined = 0.0;
  bool sup_stable = false;      // <= 20% change
  bool weighted_stable = false; // <= 20% change
  bool pass = false;
};

// Uniform and delta-weighted bounds for the rescaled kernels over a sample of
// (s, t) pairs. Requires 0 < delta < min(delta_lo(psi), 1/2).
KernelBoundsReport verify_kernel_bounds(const Symbol& symbol, const Bernstein& psi,
                                        std::span<const std::pair<double, double>> pairs,
                                        const GridSpec& grid, double delta);

struct EstimateCurve {
  std::vector<double> parameter;
  std::vector<double> lhs;
  std::vector<double> rhs_shape;
  double fitted_n = 0.0;  // max lhs / rhs_shape
};

struct TailDifferenceOptions {
  GridSpec direct_grid{1, 32.0, 1024};
  GridSpec scaled_grid{1, 64.0, 2048};
  double delta = 0.0;     // 0: use 0.45 * min(delta_lo(psi), 1/2)
  double rel_tol = 1e-3;
  int max_panels = 60;
};

struct TailDifferenceReport {
  double s = 0.0, t = 0.0, a_cut = 0.0, delta = 0.0;
  EstimateCurve tail;         // parameter c:    int_s^t int_{|z|>=c} |psi(D)p(r,t,z)| dz dr
  EstimateCurve translation;  // parameter |h|:  int_0^a int |K(r,t,z+h) - K(r,t,z)| dz dr
  EstimateCurve time_diff;    // parameter t2:   int_0^a int |K(r,t2,z) - K(r,s,z)| dz dr
  double tail_bound_fraction = 0.0;  // worst unresolved-mass fraction
};

// The three L1 transition-kernel estimates around an anchor 0 <= a_cut < s < t.
// The time singularity of the tail estimate is handled through the rescaled
// kernel on scaled_grid; translation shifts are snapped to whole grid cells.
TailDifferenceReport tail_and_difference_estimates(const Symbol& symbol, const Bernstein& psi,
                                                   double a_cut, double s, double t,
                                                   std::span<const double> c_values,
                                                   std::span<const double> h_values,
                                                   std::span<const double> t2_values,
                                                   const TailDifferenceOptions& opts = {});

struct HormanderOptions {
  GridSpec direct_grid{1, 32.0, 1024};
  GridSpec scaled_grid{1, 64.0, 2048};
  double c0 = 0.0;        // 0: fit 4 * c~0 from the inverse modulus
  double delta = 0.0;     // 0: 0.45 * min(delta_lo(psi), 1/2)
  double rel_tol = 1e-3;
  int max_panels = 60;
};

struct HormanderResult {
  double value = 0.0;
  double c0 = 0.0;
  double c_tilde0 = 0.0;
  double tail_fraction = 0.0;  // unresolved-mass bound / value
  double base_scale = 0.0;     // varphi(|t-s|) + |x-y|
};

// int_0^inf int_{A} |1_{r<t} psi(D)p(r,t,x-z) - 1_{r<s} psi(D)p(r,s,y-z)| dz dr
// over A = { z : varphi(|t-r|) + |x-z| >= c0 (varphi(|t-s|) + |x-y|) }.
// Requires t > s >= 0 (or t = s, x = y, which yields zero); x - y must be a
// whole number of grid cells.
HormanderResult hormander_integral(const Symbol& symbol, const Bernstein& psi, double t,
                                   std::span<const double> x, double s, std::span<const double> y,
                                   const HormanderOptions& opts = {});

// sup over tau pairs of varphi(t1+t2) / (varphi(t1) + varphi(t2)), clamped to >= 1.
double fit_c_tilde0(const Bernstein& psi, double tau_min = 1e-4, double tau_max = 1e2,
                    int per_decade = 8);

struct SandwichRow {
  double t = 0.0, mag = 0.0, value = 0.0, lower_shape = 0.0, upper_shape = 0.0;
};

struct TimeScalingSandwichReport {
  double n_fit = 1.0;
  bool pass = false;
  std::vector<SandwichRow> rows;
};

// N^{-1} |xi|^{dtilde1} <= t psi(|a_t xi|^2) <= N |xi|^{dtilde2} on a log-log
// (t, |xi|) grid, with the exponent pair switching at |xi| = 1 between
// (2 delta_lo, 2 delta_hi).
TimeScalingSandwichReport verify_time_scaling_sandwich(const Bernstein& psi, int nt = 32,
                                                       int nxi = 32, double t_min = 1e-3,
                                                       double t_max = 1e3, double mag_min = 1e-3,
                                                       double mag_max = 1e3);

struct InverseSandwichReport {
  double n_fit = 1.0;
  bool upper_ok = false;  // psi^{-1}(psi(tau)) <= tau (1 + 1e-9)
  bool pass = false;
};

// Round-trip control for the generalized inverse:
// N^{-1} tau <= psi^{-1}(psi(tau)) <= tau and N^{-1} tau <= psi(psi^{-1}(tau)) <= N tau.
InverseSandwichReport verify_inverse_sandwich(const Bernstein& psi, double tau_min = 1e-3,
                                              double tau_max = 1e3, int per_decade = 16);

}  // namespace jumpdiff
