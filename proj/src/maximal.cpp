#include "jumpdiff/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "jumpdiff/common.hpp"
#include "jumpdiff/grid.hpp"
#include "jumpdiff/rng.hpp"

namespace jumpdiff {

namespace {

// floor(log2 v) for v >= 1, exact at powers of two.
int floor_log2(double v) {
  int e = 0;
  double f = std::frexp(v, &e);  // v = f * 2^e, f in [0.5, 1)
  (void)f;
  return e - 1;
}

// ceil(log2 v) for v > 0, exact at powers of two.
int ceil_log2(double v) {
  int e = 0;
  double f = std::frexp(v, &e);
  return f == 0.5 ? e - 1 : e;
}

// Region lattice: time samples k = 1..K (t = 0 lies outside the covered
// region), spatial samples over the box, first axis offset for half-space.
struct Region {
  int dim = 1;       // spatial dims
  int na = 2;        // axes including time
  long sz[4] = {1, 1, 1, 1};
  long total = 1;
  long x_off = 0;    // grid index offset of region axis 1
  long stride[4] = {1, 1, 1, 1};
};

Region make_region(const SpaceTimeField& field, bool half_space) {
  Region r;
  r.dim = field.grid.dim;
  r.na = r.dim + 1;
  r.sz[0] = field.steps;
  r.x_off = half_space ? field.grid.points_per_axis / 2 : 0;
  r.sz[1] = half_space ? field.grid.points_per_axis / 2 : field.grid.points_per_axis;
  for (int i = 2; i <= r.dim; ++i) r.sz[i] = field.grid.points_per_axis;
  r.total = 1;
  for (int i = 0; i < r.na; ++i) r.total *= r.sz[i];
  for (int i = r.na - 1; i >= 0; --i)
    r.stride[i] = (i == r.na - 1) ? 1 : r.stride[i + 1] * r.sz[i + 1];
  return r;
}

// Grid flat index of a region point (excluding the time axis).
long grid_flat(const Region& r, const long* coord, const GridSpec& g) {
  std::array<int, 3> idx{0, 0, 0};
  idx[0] = static_cast<int>(coord[1] + r.x_off);
  for (int i = 2; i <= r.dim; ++i) idx[static_cast<std::size_t>(i - 1)] = static_cast<int>(coord[i]);
  return g.flatten(idx);
}

// Odometer increment over region coordinates; returns false after the last.
bool advance(const Region& r, long* coord) {
  for (int i = r.na - 1; i >= 0; --i) {
    if (++coord[i] < r.sz[i]) return true;
    coord[i] = 0;
  }
  return false;
}

void extract_region(const SpaceTimeField& field, const Region& r, bool absolute,
                    std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(r.total), 0.0);
  long coord[4] = {0, 0, 0, 0};
  long flat = 0;
  do {
    const auto level = field.level(static_cast<int>(coord[0] + 1));
    const std::complex<double> v = level[static_cast<std::size_t>(grid_flat(r, coord, field.grid))];
    out[static_cast<std::size_t>(flat)] = absolute ? std::abs(v) : v.real();
    ++flat;
  } while (advance(r, coord));
}

void store_region(const std::vector<double>& in, const Region& r, SpaceTimeField& field) {
  std::fill(field.values.begin(), field.values.end(), std::complex<double>(0.0, 0.0));
  long coord[4] = {0, 0, 0, 0};
  long flat = 0;
  do {
    field.values[static_cast<std::size_t>(coord[0] + 1) *
                     static_cast<std::size_t>(field.grid.total_points()) +
                 static_cast<std::size_t>(grid_flat(r, coord, field.grid))] =
        in[static_cast<std::size_t>(flat)];
    ++flat;
  } while (advance(r, coord));
}

// In-place inclusive prefix sums along one axis.
void prefix_axis(std::vector<double>& a, const Region& r, int axis) {
  const long len = r.sz[axis];
  const long stride = r.stride[axis];
  long outer = 1;
  for (int i = 0; i < axis; ++i) outer *= r.sz[i];
  long inner = stride;
  for (long o = 0; o < outer; ++o) {
    const long base0 = o * len * inner;
    for (long i = 1; i < len; ++i) {
      double* cur = a.data() + base0 + i * stride;
      const double* prev = cur - stride;
      for (long j = 0; j < inner; ++j) cur[j] += prev[j];
    }
  }
}

// Box sum over [lo_i, hi_i] from all-axes inclusive prefix sums.
double box_sum(const std::vector<double>& pre, const Region& r, const long* lo,
               const long* hi) {
  double acc = 0.0;
  const int corners = 1 << r.na;
  for (int c = 0; c < corners; ++c) {
    long flat = 0;
    double sign = 1.0;
    bool skip = false;
    for (int i = 0; i < r.na; ++i) {
      if ((c >> i) & 1) {
        if (lo[i] == 0) {
          skip = true;
          break;
        }
        flat += (lo[i] - 1) * r.stride[i];
        sign = -sign;
      } else {
        flat += hi[i] * r.stride[i];
      }
    }
    if (!skip) acc += sign * pre[static_cast<std::size_t>(flat)];
  }
  return acc;
}

// out[i] = max of in over [i + lo_off, i + hi_off] clamped to [0, len), along
// one axis; monotone-deque sliding maximum.
void sliding_max_axis(const std::vector<double>& in, std::vector<double>& out,
                      const Region& r, int axis, long lo_off, long hi_off) {
  const long len = r.sz[axis];
  const long stride = r.stride[axis];
  long outer = 1;
  for (int i = 0; i < axis; ++i) outer *= r.sz[i];
  const long inner = stride;
  std::vector<long> dq(static_cast<std::size_t>(len));
  for (long o = 0; o < outer; ++o) {
    for (long j = 0; j < inner; ++j) {
      const long base = o * len * inner + j;
      long head = 0, tail = 0;  // dq[head..tail) holds candidate indices
      long admitted = -1;
      for (long i = 0; i < len; ++i) {
        const long w_lo = std::max(0L, i + lo_off);
        const long w_hi = std::min(len - 1, i + hi_off);
        for (long k = std::max(admitted + 1, w_lo); k <= w_hi; ++k) {
          const double v = in[static_cast<std::size_t>(base + k * stride)];
          while (tail > head &&
                 in[static_cast<std::size_t>(base + dq[static_cast<std::size_t>(tail - 1)] * stride)] <= v)
            --tail;
          dq[static_cast<std::size_t>(tail++)] = k;
        }
        admitted = std::max(admitted, w_hi);
        while (head < tail && dq[static_cast<std::size_t>(head)] < w_lo) ++head;
        out[static_cast<std::size_t>(base + i * stride)] =
            in[static_cast<std::size_t>(base + dq[static_cast<std::size_t>(head)] * stride)];
      }
    }
  }
}

// Sample-block sizes of each filtration level on a given mesh, after
// verifying that the mesh aligns with the cells.
struct RasterMap {
  Region region;
  std::vector<long> bt;  // time samples per cell, per level
  std::vector<long> bs;  // spatial samples per cell side, per level
};

RasterMap compute_raster(const SpaceTimeField& field, const PartitionFiltration& filt) {
  if (field.grid.dim != filt.dim)
    throw ConfigurationError("field and filtration dimensions differ");
  const double h = field.grid.step();
  const double dt = field.dt();
  const double sf = filt.finest().space_side;
  const double tf = filt.finest().time_len;
  const long g = std::llround(sf / h);
  if (g < 1 || std::abs(static_cast<double>(g) * h - sf) > 1e-12 * sf)
    throw ConfigurationError("grid step does not divide the finest cell side");
  const long rr = std::llround(tf / dt);
  if (rr < 1 || std::abs(static_cast<double>(rr) * dt - tf) > 1e-12 * tf)
    throw ConfigurationError("time step does not divide the finest cell length");
  const double sc = filt.coarsest().space_side;
  const double L = field.grid.half_extent;
  const long v = std::llround(L / sc);
  if (v < 1 || std::abs(static_cast<double>(v) * sc - L) > 1e-12 * L)
    throw ConfigurationError("grid box is not aligned with the coarsest cells");
  const double tc = filt.coarsest().time_len;
  const long a = std::llround(field.t_final / tc);
  if (a < 1 || std::abs(static_cast<double>(a) * tc - field.t_final) > 1e-12 * field.t_final)
    throw ConfigurationError("time horizon is not a whole number of coarsest cells");

  RasterMap map;
  map.region = make_region(field, filt.half_space);
  for (const auto& lev : filt.levels) {
    map.bt.push_back(std::llround(lev.time_len / tf) * rr);
    map.bs.push_back((1L << (filt.finest().n - lev.n)) * g);
  }

  // Coverage: the t = 0 plane, and the x_1 < 0 half when restricted, must
  // carry no mass.
  const double tol = 1e-12 * (1.0 + field.max_abs());
  for (const auto& value : field.level(0))
    if (std::abs(value) > tol)
      throw ConfigurationError("field has support outside the covered region (t = 0 plane)");
  if (filt.half_space) {
    const int m = field.grid.points_per_axis;
    std::array<int, 3> idx{0, 0, 0};
    for (long flat = 0; flat < field.grid.total_points(); ++flat) {
      field.grid.unflatten(flat, idx);
      if (idx[0] >= m / 2) continue;  // x_1 >= 0
      for (int k = 1; k <= field.steps; ++k)
        if (std::abs(field.level(k)[static_cast<std::size_t>(flat)]) > tol)
          throw ConfigurationError("field has support outside the covered region (x_1 < 0)");
    }
  }
  return map;
}

std::vector<double> ladder_radii(const SpaceTimeField& field, const PhiFn& phi,
                                 const MaximalOptions& opts) {
  const double h = field.grid.step();
  const double dt = field.dt();
  double c = opts.c_min > 0.0 ? opts.c_min : h;
  std::vector<double> out;
  long prev_wt = -1, prev_ws = -1;
  const long k = field.steps;
  const long mx = field.grid.points_per_axis;
  for (int iter = 0; iter < 300; ++iter) {
    if (opts.c_max > 0.0 && c > opts.c_max * (1.0 + 1e-12)) break;
    const long wt = std::max(1L, static_cast<long>(std::floor(phi(c) / dt + 1e-9)));
    const long ws = std::max(0L, static_cast<long>(std::ceil(c / h - 1e-9)) - 1);
    if (wt != prev_wt || ws != prev_ws) {
      out.push_back(c);
      prev_wt = wt;
      prev_ws = ws;
    }
    if (opts.c_max <= 0.0 && wt >= k && ws >= mx) break;
    c *= opts.ladder_ratio;
  }
  return out;
}

}  // namespace

PhiAssumptionsReport check_phi_assumptions(const PhiFn& phi, double r_min, double r_max,
                                           int per_decade) {
  if (!(r_min > 0.0 && r_max > r_min) || per_decade < 1)
    throw ConfigurationError("phi assumptions need a positive sample range");
  PhiAssumptionsReport rep;
  const double step = std::pow(10.0, 1.0 / per_decade);
  std::vector<double> rs;
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= step) rs.push_back(r);

  bool monotone = true, positive = true;
  double prev = phi(rs.front());
  for (double r : rs) {
    const double p0 = phi(r), p2 = phi(2.0 * r);
    if (!(p0 > 0.0) || !std::isfinite(p2)) positive = false;
    if (p0 < prev * (1.0 - 1e-12)) monotone = false;
    prev = p0;
    if (p0 > 0.0) rep.c_tilde = std::max(rep.c_tilde, p2 / p0);
  }

  // Smallest power-of-two factor that doubles phi across the whole grid. The
  // candidate must work at r_max too, so phi gets evaluated up to lambda *
  // r_max; a bounded phi therefore fails every candidate instead of slipping
  // past the top of the grid.
  for (double lambda = 2.0; lambda <= 1048576.0; lambda *= 2.0) {
    bool ok = true;
    for (double r : rs) {
      if (phi(lambda * r) < 2.0 * phi(r)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      rep.lambda0 = lambda;
      break;
    }
  }
  rep.pass = positive && monotone && std::isfinite(rep.c_tilde) && rep.c_tilde > 0.0 &&
             rep.lambda0 > 0.0;
  return rep;
}

PartitionFiltration build_filtration(const PhiFn& phi, int n_min, int n_max, int dim,
                                     bool half_space) {
  if (n_min > n_max) throw ConfigurationError("filtration level range is empty");
  if (dim < 1 || dim > 3) throw ConfigurationError("filtration dim must be 1, 2, or 3");
  const PhiAssumptionsReport assumptions = check_phi_assumptions(phi);
  if (!assumptions.pass)
    throw ConfigurationError("scale function fails the doubling assumptions");

  // Anchor sigma = 1 at level 0, then chain time lengths by exact powers of
  // two in both directions.
  const int lo = std::min(0, n_min), hi = std::max(0, n_max);
  std::vector<double> time_len(static_cast<std::size_t>(hi - lo + 1));
  auto at = [&](int n) -> double& { return time_len[static_cast<std::size_t>(n - lo)]; };
  at(0) = phi(1.0);
  if (!(at(0) > 0.0)) throw ConfigurationError("scale function must be positive at 1");
  for (int k = 0; k < hi; ++k) {
    // Finer: divide by the dyadic bracket of phi(2^-k) sigma_k / phi(2^-k-1).
    const double ratio = at(k) / phi(std::ldexp(1.0, -(k + 1)));
    if (!(ratio >= 1.0 - 1e-12)) throw std::logic_error("filtration: time ratio fell below 1");
    at(k + 1) = std::ldexp(at(k), -floor_log2(std::max(1.0, ratio)));
  }
  for (int k = 0; k > lo; --k) {
    const double q = phi(std::ldexp(1.0, -(k - 1))) / at(k);
    at(k - 1) = std::ldexp(at(k), ceil_log2(q));
  }

  PartitionFiltration filt;
  filt.phi = phi;
  filt.dim = dim;
  filt.half_space = half_space;
  filt.c_tilde = assumptions.c_tilde;
  filt.n0_bound = std::ldexp(1.0, dim + 1) * assumptions.c_tilde;
  for (int n = n_min; n <= n_max; ++n) {
    FiltrationLevel lev;
    lev.n = n;
    lev.space_side = std::ldexp(1.0, -n);
    lev.time_len = at(n);
    lev.sigma = lev.time_len / phi(lev.space_side);
    if (!(lev.sigma >= 1.0 - 1e-9 && lev.sigma < 2.0 + 1e-9))
      throw std::logic_error("filtration: shift factor escaped [1, 2)");
    filt.levels.push_back(lev);
  }
  for (std::size_t i = 0; i + 1 < filt.levels.size(); ++i) {
    const double ratio = filt.levels[i].time_len / filt.levels[i + 1].time_len;
    const int ell = static_cast<int>(std::llround(std::log2(ratio)));
    filt.levels[i].ell_to_finer = ell;
    filt.n0 = std::max(filt.n0, std::ldexp(1.0, dim + ell));
  }
  if (filt.levels.size() == 1) filt.n0 = std::ldexp(1.0, dim + 1);
  return filt;
}

NestingReport verify_partition_nesting(const PartitionFiltration& filt) {
  NestingReport rep;
  rep.sigma_ok = true;
  rep.time_nesting_exact = true;
  rep.space_nesting_exact = true;
  for (const auto& lev : filt.levels)
    if (!(lev.sigma >= 1.0 - 1e-9 && lev.sigma < 2.0 + 1e-9)) rep.sigma_ok = false;

  for (std::size_t i = 0; i + 1 < filt.levels.size(); ++i) {
    const auto& parent = filt.levels[i];
    const auto& child = filt.levels[i + 1];
    const int ell = parent.ell_to_finer;
    if (std::ldexp(child.time_len, ell) != parent.time_len) rep.time_nesting_exact = false;
    if (child.space_side * 2.0 != parent.space_side) rep.space_nesting_exact = false;
    // Exhaustive containment over a whole parent block of child time cells,
    // repeated across several parents.
    const long block = 1L << ell;
    for (long it = 0; it < std::min(block * 8, 1L << 14); ++it) {
      const long ip = it >> ell;
      const double c_lo = static_cast<double>(it) * child.time_len;
      const double c_hi = static_cast<double>(it + 1) * child.time_len;
      const double p_lo = static_cast<double>(ip) * parent.time_len;
      const double p_hi = static_cast<double>(ip + 1) * parent.time_len;
      if (!(c_lo >= p_lo && c_hi <= p_hi)) rep.time_nesting_exact = false;
    }
    rep.max_volume_ratio = std::max(
        rep.max_volume_ratio, std::ldexp(1.0, filt.dim + ell));
  }
  rep.ratio_within_bound = rep.max_volume_ratio <= filt.n0_bound * (1.0 + 1e-9);
  rep.pass = rep.sigma_ok && rep.time_nesting_exact && rep.space_nesting_exact &&
             rep.ratio_within_bound;
  return rep;
}

SpaceTimeField sharp_function(const SpaceTimeField& field, const PartitionFiltration& filt) {
  const RasterMap map = compute_raster(field, filt);
  const Region& r = map.region;
  std::vector<double> f;
  extract_region(field, r, false, f);
  std::vector<double> out(static_cast<std::size_t>(r.total), 0.0);

  std::vector<double> sums, oscs;
  std::vector<long> cidx[4];
  for (std::size_t li = 0; li < filt.levels.size(); ++li) {
    const long bt = map.bt[li];
    const long bs = map.bs[li];
    long cells = 1;
    long csz[4];
    for (int ax = 0; ax < r.na; ++ax) {
      const long b = ax == 0 ? bt : bs;
      if (r.sz[ax] % b != 0)
        throw ConfigurationError("field mesh does not tile the filtration cells");
      csz[ax] = r.sz[ax] / b;
      cells *= csz[ax];
      cidx[ax].assign(static_cast<std::size_t>(r.sz[ax]), 0);
      for (long i = 0; i < r.sz[ax]; ++i) cidx[ax][static_cast<std::size_t>(i)] = i / b;
    }
    const double inv_count = static_cast<double>(cells) / static_cast<double>(r.total);

    sums.assign(static_cast<std::size_t>(cells), 0.0);
    long coord[4] = {0, 0, 0, 0};
    long flat = 0;
    do {
      long c = 0;
      for (int ax = 0; ax < r.na; ++ax)
        c = c * csz[ax] + cidx[ax][static_cast<std::size_t>(coord[ax])];
      sums[static_cast<std::size_t>(c)] += f[static_cast<std::size_t>(flat)];
      ++flat;
    } while (advance(r, coord));
    for (double& s : sums) s *= inv_count;  // cell means

    oscs.assign(static_cast<std::size_t>(cells), 0.0);
    std::fill(coord, coord + 4, 0L);
    flat = 0;
    do {
      long c = 0;
      for (int ax = 0; ax < r.na; ++ax)
        c = c * csz[ax] + cidx[ax][static_cast<std::size_t>(coord[ax])];
      oscs[static_cast<std::size_t>(c)] +=
          std::abs(f[static_cast<std::size_t>(flat)] - sums[static_cast<std::size_t>(c)]);
      ++flat;
    } while (advance(r, coord));
    for (double& o : oscs) o *= inv_count;

    std::fill(coord, coord + 4, 0L);
    flat = 0;
    do {
      long c = 0;
      for (int ax = 0; ax < r.na; ++ax)
        c = c * csz[ax] + cidx[ax][static_cast<std::size_t>(coord[ax])];
      out[static_cast<std::size_t>(flat)] =
          std::max(out[static_cast<std::size_t>(flat)], oscs[static_cast<std::size_t>(c)]);
      ++flat;
    } while (advance(r, coord));
  }

  SpaceTimeField result(field.grid, field.steps, field.t_final);
  store_region(out, r, result);
  return result;
}

std::vector<double> cube_ladder(const SpaceTimeField& field, const PhiFn& phi,
                                const MaximalOptions& opts) {
  return ladder_radii(field, phi, opts);
}

SpaceTimeField maximal_function(const SpaceTimeField& field, const PhiFn& phi,
                                const MaximalOptions& opts) {
  const Region r = make_region(field, opts.half_space);
  std::vector<double> absf;
  extract_region(field, r, true, absf);
  std::vector<double> pre = absf;
  for (int ax = 0; ax < r.na; ++ax) prefix_axis(pre, r, ax);

  std::vector<double> out(static_cast<std::size_t>(r.total), 0.0);
  std::vector<double> means(static_cast<std::size_t>(r.total));
  std::vector<double> scratch(static_cast<std::size_t>(r.total));
  const double h = field.grid.step();
  const double dt = field.dt();

  for (double c : ladder_radii(field, phi, opts)) {
    const long wt = std::max(1L, static_cast<long>(std::floor(phi(c) / dt + 1e-9)));
    const long ws = std::max(0L, static_cast<long>(std::ceil(c / h - 1e-9)) - 1);

    // Mean of |f| over each anchored cube's in-region samples.
    long coord[4] = {0, 0, 0, 0};
    long flat = 0;
    long lo[4], hi[4];
    do {
      long count = 1;
      lo[0] = coord[0];
      hi[0] = std::min(coord[0] + wt - 1, r.sz[0] - 1);
      count *= hi[0] - lo[0] + 1;
      for (int ax = 1; ax < r.na; ++ax) {
        lo[ax] = std::max(0L, coord[ax] - ws);
        hi[ax] = std::min(r.sz[ax] - 1, coord[ax] + ws);
        count *= hi[ax] - lo[ax] + 1;
      }
      means[static_cast<std::size_t>(flat)] =
          box_sum(pre, r, lo, hi) / static_cast<double>(count);
      ++flat;
    } while (advance(r, coord));

    // Dilate: each point takes the max over anchors whose cube contains it.
    std::vector<double>* cur = &means;
    std::vector<double>* nxt = &scratch;
    for (int ax = 0; ax < r.na; ++ax) {
      const long lo_off = ax == 0 ? -(wt - 1) : -ws;
      const long hi_off = ax == 0 ? 0 : ws;
      sliding_max_axis(*cur, *nxt, r, ax, lo_off, hi_off);
      std::swap(cur, nxt);
    }
    for (long i = 0; i < r.total; ++i)
      out[static_cast<std::size_t>(i)] =
          std::max(out[static_cast<std::size_t>(i)], (*cur)[static_cast<std::size_t>(i)]);
  }

  SpaceTimeField result(field.grid, field.steps, field.t_final);
  store_region(out, r, result);
  return result;
}

double region_lp_norm(const SpaceTimeField& field, double p, bool half_space) {
  if (!(p >= 1.0)) throw ConfigurationError("norm exponent must be >= 1");
  const Region r = make_region(field, half_space);
  std::vector<double> f;
  extract_region(field, r, true, f);
  for (double& v : f) v = std::pow(v, p);
  const double weight = field.dt() * field.grid.cell_volume();
  return std::pow(pairwise_sum(f) * weight, 1.0 / p);
}

FsHlReport verify_fs_hl(const PartitionFiltration& filt, const FsHlOptions& opts) {
  if (opts.n_fields < 1 || opts.p_list.empty())
    throw ConfigurationError("need at least one field and one exponent");
  for (double p : opts.p_list)
    if (!(p > 1.0)) throw ConfigurationError("Fefferman-Stein exponents must be > 1");

  // Canonical raster: one sample per finest cell, box of one coarsest cell
  // per half-axis, horizon of one coarsest time cell. The grid minimum of 16
  // points per axis may force several samples per finest cell side.
  const int d = filt.dim;
  const double L = filt.coarsest().space_side;
  long m = 2 * std::llround(filt.coarsest().space_side / filt.finest().space_side);
  long g = 1;
  while (m < 16) {
    m *= 2;
    g *= 2;
  }
  const long steps = std::llround(filt.coarsest().time_len / filt.finest().time_len);
  const GridSpec grid(d, L, static_cast<int>(m));
  const double t_final = filt.coarsest().time_len;

  const std::size_t np = opts.p_list.size();
  const int refine_count = opts.check_refined ? std::min(opts.n_fields, 24) : 0;
  FsHlReport report;
  report.n0 = filt.n0;
  report.c_tilde = filt.c_tilde;
  report.rows.assign(static_cast<std::size_t>(opts.n_fields) * np, FsHlRow{});
  std::vector<double> refined_ratios(static_cast<std::size_t>(refine_count) * np, 0.0);

  const Region region = make_region(SpaceTimeField(grid, static_cast<int>(steps), t_final),
                                    filt.half_space);

  auto generate_field = [&](long fi) -> SpaceTimeField {
    Rng rng(Rng::derive(opts.seed, static_cast<std::uint64_t>(fi)));
    SpaceTimeField f(grid, static_cast<int>(steps), t_final);
    std::vector<double> vals(static_cast<std::size_t>(region.total), 0.0);

    const int kind = static_cast<int>(fi % 3);
    if (kind == 0) {
      for (double& v : vals) v = rng.uniform(-1.0, 1.0);
    } else if (kind == 1) {
      // A few random level cells with random amplitudes.
      for (int rep = 0; rep < 5; ++rep) {
        const std::size_t li =
            std::min(filt.levels.size() - 1,
                     static_cast<std::size_t>(rng.uniform() *
                                              static_cast<double>(filt.levels.size())));
        const long bt = std::llround(filt.levels[li].time_len / filt.finest().time_len);
        const long bs = (1L << (filt.finest().n - filt.levels[li].n)) * g;
        const double amp = rng.normal();
        long cell_lo[4];
        cell_lo[0] = (static_cast<long>(rng.uniform() * static_cast<double>(region.sz[0] / bt))) * bt;
        for (int ax = 1; ax < region.na; ++ax)
          cell_lo[ax] =
              (static_cast<long>(rng.uniform() * static_cast<double>(region.sz[ax] / bs))) * bs;
        long coord[4] = {0, 0, 0, 0};
        long flat = 0;
        do {
          bool inside = coord[0] >= cell_lo[0] && coord[0] < cell_lo[0] + bt;
          for (int ax = 1; inside && ax < region.na; ++ax)
            inside = coord[ax] >= cell_lo[ax] && coord[ax] < cell_lo[ax] + bs;
          if (inside) vals[static_cast<std::size_t>(flat)] += amp;
          ++flat;
        } while (advance(region, coord));
      }
    } else {
      // Noise confined to one coarse half of the region.
      long coord[4] = {0, 0, 0, 0};
      long flat = 0;
      do {
        if (coord[1] < region.sz[1] / 2)
          vals[static_cast<std::size_t>(flat)] = rng.uniform(-1.0, 1.0);
        ++flat;
      } while (advance(region, coord));
    }

    // Zero mean on every coarsest cell, so the truncated region behaves like
    // the infinite one in the Fefferman-Stein argument.
    {
      const long bt = std::llround(filt.coarsest().time_len / filt.finest().time_len);
      const long bs = (1L << (filt.finest().n - filt.coarsest().n)) * g;
      long csz[4], cells = 1;
      for (int ax = 0; ax < region.na; ++ax) {
        csz[ax] = region.sz[ax] / (ax == 0 ? bt : bs);
        cells *= csz[ax];
      }
      std::vector<double> sums(static_cast<std::size_t>(cells), 0.0);
      long coord[4] = {0, 0, 0, 0};
      long flat = 0;
      do {
        long c = 0;
        for (int ax = 0; ax < region.na; ++ax)
          c = c * csz[ax] + coord[ax] / (ax == 0 ? bt : bs);
        sums[static_cast<std::size_t>(c)] += vals[static_cast<std::size_t>(flat)];
        ++flat;
      } while (advance(region, coord));
      const double inv = static_cast<double>(cells) / static_cast<double>(region.total);
      for (double& s : sums) s *= inv;
      std::fill(coord, coord + 4, 0L);
      flat = 0;
      do {
        long c = 0;
        for (int ax = 0; ax < region.na; ++ax)
          c = c * csz[ax] + coord[ax] / (ax == 0 ? bt : bs);
        vals[static_cast<std::size_t>(flat)] -= sums[static_cast<std::size_t>(c)];
        ++flat;
      } while (advance(region, coord));
    }

    store_region(vals, region, f);
    return f;
  };

  parallel_for(opts.n_fields, [&](long fi) {
    const SpaceTimeField f = generate_field(fi);
    const SpaceTimeField sharp = sharp_function(f, filt);
    MaximalOptions mo;
    mo.half_space = filt.half_space;
    const SpaceTimeField maxi = maximal_function(f, filt.phi, mo);

    for (std::size_t pi = 0; pi < np; ++pi) {
      const double p = opts.p_list[pi];
      const double q = p / (p - 1.0);
      FsHlRow row;
      row.field_index = static_cast<int>(fi);
      row.p = p;
      row.f_norm = region_lp_norm(f, p, filt.half_space);
      row.sharp_norm = region_lp_norm(sharp, p, filt.half_space);
      row.fs_constant = std::pow(2.0 * q, p) * std::pow(filt.n0, p - 1.0);
      row.fs_ok = row.f_norm <= row.fs_constant * row.sharp_norm * (1.0 + 1e-9);
      row.fs_ratio =
          row.sharp_norm > 0.0 ? row.f_norm / (row.fs_constant * row.sharp_norm) : 0.0;
      row.hl_ratio =
          row.f_norm > 0.0 ? region_lp_norm(maxi, p, filt.half_space) / row.f_norm : 0.0;
      report.rows[static_cast<std::size_t>(fi) * np + pi] = row;
    }
  });

  // Stability pass: the same step functions on a doubled mesh, concurrency
  // capped because each instance is four times the base size.
  parallel_for(
      refine_count,
      [&](long fi) {
        const SpaceTimeField f = generate_field(fi);
        const GridSpec grid2(d, L, static_cast<int>(2 * m));
        SpaceTimeField f2(grid2, static_cast<int>(2 * steps), t_final);
        std::array<int, 3> idx{0, 0, 0};
        std::array<int, 3> ib{0, 0, 0};
        for (int k = 1; k <= f2.steps; ++k) {
          const int kb = (k + 1) / 2;
          auto dst = f2.values.begin() +
                     static_cast<std::ptrdiff_t>(k) * grid2.total_points();
          const auto src = f.level(kb);
          for (long flat2 = 0; flat2 < grid2.total_points(); ++flat2) {
            grid2.unflatten(flat2, idx);
            for (int ax = 0; ax < d; ++ax)
              ib[static_cast<std::size_t>(ax)] = idx[static_cast<std::size_t>(ax)] / 2;
            dst[flat2] = src[static_cast<std::size_t>(grid.flatten(ib))];
          }
        }
        MaximalOptions mo;
        mo.half_space = filt.half_space;
        const SpaceTimeField maxi2 = maximal_function(f2, filt.phi, mo);
        for (std::size_t pi = 0; pi < np; ++pi) {
          const double fn = region_lp_norm(f2, opts.p_list[pi], filt.half_space);
          refined_ratios[static_cast<std::size_t>(fi) * np + pi] =
              fn > 0.0 ? region_lp_norm(maxi2, opts.p_list[pi], filt.half_space) / fn : 0.0;
        }
      },
      4);

  for (const auto& row : report.rows) {
    if (!row.fs_ok) ++report.fs_violations;
    report.max_hl_ratio = std::max(report.max_hl_ratio, row.hl_ratio);
  }
  if (refine_count > 0) {
    for (int fi = 0; fi < refine_count; ++fi)
      for (std::size_t pi = 0; pi < np; ++pi) {
        report.subset_max_hl_ratio =
            std::max(report.subset_max_hl_ratio,
                     report.rows[static_cast<std::size_t>(fi) * np + pi].hl_ratio);
        report.refined_max_hl_ratio =
            std::max(report.refined_max_hl_ratio,
                     refined_ratios[static_cast<std::size_t>(fi) * np + pi]);
      }
    report.hl_stable =
        report.refined_max_hl_ratio <= report.subset_max_hl_ratio * opts.hl_stability_factor &&
        report.refined_max_hl_ratio >= report.subset_max_hl_ratio / opts.hl_stability_factor;
  } else {
    report.hl_stable = true;
  }
  report.pass = report.fs_violations == 0 && report.hl_stable &&
                std::isfinite(report.max_hl_ratio);
  return report;
}

}  // namespace jumpdiff
