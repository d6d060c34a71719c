#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jumpdiff/bernstein.hpp"
#include "jumpdiff/field.hpp"

namespace jumpdiff {

// Scale functions here are plain positive nondecreasing maps; powers like
// r^{3/2} are legitimate even though they are not Bernstein functions.
using PhiFn = std::function<double(double)>;

inline PhiFn phi_fn(const Bernstein& b) {
  return [b](double r) { return b(r); };
}

struct PhiAssumptionsReport {
  double c_tilde = 0.0;   // sup sampled phi(2r)/phi(r)
  double lambda0 = 0.0;   // smallest sampled doubling factor, 0 = none found
  bool pass = false;
};

// Samples phi on a log grid over [r_min, r_max]: c_tilde from the ratio at
// doubling, lambda0 by searching powers of two for phi(lambda r) >= 2 phi(r)
// across the whole grid. Bounded phi makes the search fail.
PhiAssumptionsReport check_phi_assumptions(const PhiFn& phi, double r_min = 1e-6,
                                           double r_max = 1e6, int per_decade = 16);

// Time slab (t0, t0 + phi(c)] over the box of half-width c around x0. The
// spatial sets are sup-norm balls so cubes stay grid-aligned in every
// dimension; at d = 1 this is the Euclidean ball.
struct ParabolicCube {
  double t0 = 0.0;
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  double radius = 0.0;
  double duration = 0.0;

  bool contains(double t, std::span<const double> x) const {
    if (!(t > t0 && t <= t0 + duration)) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(std::abs(x[i] - x0[i]) < radius)) return false;
    return true;
  }
};

struct FiltrationLevel {
  int n = 0;              // spatial side 2^{-n}
  double sigma = 1.0;     // shift factor, always in [1, 2)
  double time_len = 0.0;  // phi(2^{-n}) * sigma
  double space_side = 0.0;
  int ell_to_finer = 0;   // time_len = 2^{ell} * next finer time_len; 0 on the finest
};

struct PartitionFiltration {
  PhiFn phi;
  std::vector<FiltrationLevel> levels;  // coarse to fine
  int dim = 1;
  bool half_space = false;
  double c_tilde = 0.0;
  double n0 = 0.0;        // max realized parent/child volume ratio
  double n0_bound = 0.0;  // 2^{d+1} c_tilde

  const FiltrationLevel& coarsest() const { return levels.front(); }
  const FiltrationLevel& finest() const { return levels.back(); }
};

// Inductive construction anchored at sigma = 1 on level 0, run upward and
// downward to cover [n_min, n_max]. Time lengths are chained by exact powers
// of two, so cell nesting is exact in floating point. A shift factor outside
// [1, 2) indicates a construction bug and throws logic_error.
PartitionFiltration build_filtration(const PhiFn& phi, int n_min, int n_max, int dim,
                                     bool half_space = false);

struct NestingReport {
  bool sigma_ok = false;
  bool time_nesting_exact = false;
  bool space_nesting_exact = false;
  double max_volume_ratio = 0.0;
  bool ratio_within_bound = false;
  bool pass = false;
};

// Exhaustive index-level nesting check across adjacent levels.
NestingReport verify_partition_nesting(const PartitionFiltration& filt);

// Pointwise sup over levels of the mean oscillation of the field over the
// containing cell. The field's mesh must align with the filtration cells
// (integer samples per finest cell in both time and space); support outside
// the covered region (the t = 0 plane, or x_1 < 0 for half-space) is a
// coverage error.
SpaceTimeField sharp_function(const SpaceTimeField& field,
                              const PartitionFiltration& filt);

struct MaximalOptions {
  double ladder_ratio = 1.4142135623730951;
  double c_min = 0.0;  // 0 = grid step
  double c_max = 0.0;  // 0 = grow until cubes swallow the region
  bool half_space = false;
};

// Pointwise max over grid-anchored cubes (radius on a geometric ladder) of
// the mean of |field| over the cube's in-region samples.
SpaceTimeField maximal_function(const SpaceTimeField& field, const PhiFn& phi,
                                const MaximalOptions& opts = {});

// The cube radii maximal_function would use for this field.
std::vector<double> cube_ladder(const SpaceTimeField& field, const PhiFn& phi,
                                const MaximalOptions& opts = {});

// Discrete L_p norm over the covered region (t > 0, and x_1 >= 0 when
// half_space), weighted by the sample volume dt * h^d.
double region_lp_norm(const SpaceTimeField& field, double p, bool half_space = false);

struct FsHlOptions {
  int n_fields = 100;
  std::vector<double> p_list{2.0, 4.0};
  std::uint64_t seed = 0xf51dULL;
  bool check_refined = true;  // recompute HL ratios on a doubled mesh
  double hl_stability_factor = 1.2;
};

struct FsHlRow {
  int field_index = 0;
  double p = 0.0;
  double f_norm = 0.0;
  double sharp_norm = 0.0;
  double fs_constant = 0.0;  // (2q)^p N0^{p-1}
  double fs_ratio = 0.0;     // f_norm / (fs_constant * sharp_norm)
  bool fs_ok = false;
  double hl_ratio = 0.0;  // |M_phi f|_p / |f|_p
};

struct FsHlReport {
  double n0 = 0.0;
  double c_tilde = 0.0;
  std::vector<FsHlRow> rows;
  int fs_violations = 0;
  double max_hl_ratio = 0.0;
  double subset_max_hl_ratio = 0.0;   // base-mesh max over the refined subset
  double refined_max_hl_ratio = 0.0;  // doubled-mesh max over the same subset
  bool hl_stable = false;
  bool pass = false;
};

// Seeded random fields on the filtration's canonical raster (one sample per
// finest cell), normalized to zero mean on every coarsest cell so the
// Fefferman-Stein constant applies on the truncated region. Checks
// |f|_p <= (2q)^p N0^{p-1} |f^#|_p per field and p, and reports
// Hardy-Littlewood ratios plus their stability under mesh doubling.
FsHlReport verify_fs_hl(const PartitionFiltration& filt, const FsHlOptions& opts = {});

}  // namespace jumpdiff
