#include "jumpdiff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <utility>

#include "jumpdiff/fft.hpp"

namespace jumpdiff {

namespace {

constexpr double kShellTol = 1e-12;
constexpr int kMaxPointsPerAxis = 1 << 22;

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

// Multiplier sample for one kernel flavour at one frequency node.
struct Multiplier {
  const Symbol* symbol;
  const Bernstein* psi;
  double s, t, a;
  KernelWhich which;
  int axis;

  std::complex<double> operator()(const std::array<double, 3>& xi, int dim) const {
    std::span<const double> raw(xi.data(), static_cast<std::size_t>(dim));
    if (which == KernelWhich::P) return std::exp(symbol->accumulated(s, t, raw));
    if (which == KernelWhich::PsiDeltaP) {
      double lam = 0.0;
      for (int i = 0; i < dim; ++i) lam += xi[i] * xi[i];
      double w = lam > 0.0 ? (*psi)(lam) : psi->at_zero();
      return w * std::exp(symbol->accumulated(s, t, raw));
    }
    std::array<double, 3> sc{};
    double lam = 0.0;
    for (int i = 0; i < dim; ++i) {
      sc[i] = a * xi[i];
      lam += sc[i] * sc[i];
    }
    std::span<const double> scaled(sc.data(), static_cast<std::size_t>(dim));
    double w = lam > 0.0 ? (*psi)(lam) : psi->at_zero();
    std::complex<double> e = std::exp(symbol->accumulated(s, t, scaled));
    double lapse = t - s;
    switch (which) {
      case KernelWhich::Q1:
        return lapse * w * e;
      case KernelWhich::Q2:
        return std::complex<double>(0.0, xi[axis]) * (lapse * w) * e;
      default:
        return lapse * lapse * symbol->psi(t, scaled) * w * e;
    }
  }
};

// Largest multiplier modulus over the axis and corner points of the Nyquist
// shell a grid with mp points per axis would have.
double nyquist_probe(const Multiplier& m, const GridSpec& grid, int mp) {
  double nyq = grid.freq_step() * (mp / 2);
  double worst = 0.0;
  std::array<double, 3> xi{};
  for (int i = 0; i < grid.dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      xi = {0.0, 0.0, 0.0};
      xi[i] = sign * nyq;
      worst = std::max(worst, std::abs(m(xi, grid.dim)));
    }
  }
  for (double sign : {1.0, -1.0}) {
    xi = {0.0, 0.0, 0.0};
    for (int i = 0; i < grid.dim; ++i) xi[i] = sign * nyq;
    worst = std::max(worst, std::abs(m(xi, grid.dim)));
  }
  return worst;
}

[[noreturn]] void throw_resolution(const Multiplier& m, const GridSpec& grid, double shell_max) {
  int required = 0;
  for (int mp = grid.points_per_axis * 2; mp <= kMaxPointsPerAxis; mp *= 2) {
    if (nyquist_probe(m, grid, mp) <= kShellTol) {
      required = mp;
      break;
    }
  }
  char mod[32];
  std::snprintf(mod, sizeof mod, "%.3g", shell_max);
  std::string msg = "kernel " + kernel_which_name(m.which) + ": multiplier modulus " + mod +
                    " at the Nyquist shell exceeds 1e-12; ";
  msg += required > 0 ? "need at least " + std::to_string(required) + " points per axis"
                      : "no power of two up to 2^22 suffices at this extent";
  throw ResolutionError(msg, required > 0 ? required : kMaxPointsPerAxis);
}

bool resolves(const Multiplier& m, const GridSpec& grid) {
  return nyquist_probe(m, grid, grid.points_per_axis) <= kShellTol;
}

// One integrand evaluation: the payload and an unresolved-mass cap.
struct VecEval {
  std::vector<double> value, cap;
};

VecEval composite_midpoint(const std::function<VecEval(double)>& f, double lo, double hi, int n) {
  double h = (hi - lo) / n;
  VecEval acc;
  for (int i = 0; i < n; ++i) {
    VecEval e = f(lo + (i + 0.5) * h);
    if (acc.value.empty()) {
      acc.value.assign(e.value.size(), 0.0);
      acc.cap.assign(e.cap.size(), 0.0);
    }
    for (std::size_t k = 0; k < e.value.size(); ++k) acc.value[k] += e.value[k] * h;
    for (std::size_t k = 0; k < e.cap.size(); ++k) acc.cap[k] += e.cap[k] * h;
  }
  return acc;
}

// Adaptive composite midpoint; doubles the node count until the payload
// settles to rel_tol or the halving budget runs out.
VecEval midpoint_panel(const std::function<VecEval(double)>& f, double lo, double hi,
                       double rel_tol, int max_halvings, bool throw_on_budget = false) {
  VecEval prev = composite_midpoint(f, lo, hi, 1);
  for (int h = 1; h <= max_halvings; ++h) {
    VecEval cur = composite_midpoint(f, lo, hi, 1 << h);
    double worst = 0.0;
    for (std::size_t k = 0; k < cur.value.size(); ++k) {
      double scale = std::max(std::abs(cur.value[k]), 1e-300);
      worst = std::max(worst, std::abs(cur.value[k] - prev.value[k]) / scale);
    }
    if (worst <= rel_tol) return cur;
    prev = std::move(cur);
    if (h == max_halvings && throw_on_budget && worst > 10.0 * rel_tol)
      throw AccuracyError("time quadrature did not settle to " + std::to_string(rel_tol) +
                          " within " + std::to_string(max_halvings) + " halvings");
  }
  return prev;
}

// int_0^U u^{-1} a_u^{-delta} du by log-midpoint panels; integrable because
// a_u^{-delta} vanishes polynomially as u -> 0.
double scale_decay_integral(const Bernstein& psi, double upper, double delta) {
  double acc = 0.0;
  double u = upper;
  const double ln2 = std::log(2.0);
  for (int k = 0; k < 80; ++k) {
    double mid = u / std::sqrt(2.0);
    double term = std::pow(scaling_factor(psi, mid), -delta) * ln2;
    acc += term;
    if (term < 1e-9 * acc) break;
    u *= 0.5;
  }
  return acc;
}

struct SingularTailResult {
  std::vector<double> value, bound;
  int panels = 0;
};

// int over r of (sing - r)^{-1} * [mass of |psi(D)p(r,sing,.)| beyond the
// radii(r) thresholds], rewritten through the rescaled kernel q1 so the
// integrand stays on one O(1) grid while r approaches the singular endpoint.
// floor_radii are per-component lower bounds on radii(r), used to cap the
// contribution of the panels never visited.
SingularTailResult singular_tail_integral(const Symbol& symbol, const Bernstein& psi, double far,
                                          double sing,
                                          const std::function<std::vector<double>(double)>& radii,
                                          std::span<const double> floor_radii,
                                          const GridSpec& qgrid, double delta, double rel_tol,
                                          int max_panels) {
  const std::size_t nc = floor_radii.size();
  const double cd = std::sqrt(sphere_area(qgrid.dim) / (2.0 * delta));
  double wref = 0.0;
  double extrap_ref = 0.0, g_ref = 0.0;

  auto integrand = [&](double r) -> VecEval {
    KernelSnapshot q1 = compute_kernel(symbol, &psi, r, sing, qgrid, KernelWhich::Q1);
    RadialProfile prof(q1, delta);
    wref = std::max(wref, prof.weighted_norm());
    extrap_ref = std::max(extrap_ref, prof.unresolved_beyond(0.0));
    g_ref = std::max(g_ref, prof.octave_ratio());
    double lapse = sing - r;
    std::vector<double> rad = radii(r);
    VecEval out;
    out.value.resize(nc);
    out.cap.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      double rr = q1.scaling * std::max(rad[i], 0.0);
      out.value[i] = prof.tail(rr) / lapse;
      out.cap[i] = prof.unresolved_beyond(rr) / lapse;
    }
    return out;
  };

  // Estimated mass over the unvisited lapses below `upper`: dyadic pieces,
  // each ln2 times the extrapolated beyond-box tail at the piece's largest
  // lapse (the rescaling pushes the threshold further out as the lapse
  // shrinks, so the terms decay geometrically).
  auto extrapolated_remainder = [&](double upper, double floor_i) {
    if (extrap_ref <= 0.0) return 0.0;
    const double lg = std::log2(std::min(g_ref, 0.9));
    double acc = 0.0, lapse = upper;
    for (int k = 0; k < 300 && lapse > 0.0; ++k) {
      double rr = scaling_factor(psi, lapse) * floor_i;
      double term = std::log(2.0) * extrap_ref *
                    (rr <= qgrid.half_extent ? 1.0 : std::pow(rr / qgrid.half_extent, lg));
      acc += term;
      if (term < 1e-6 * acc) break;
      lapse *= 0.5;
    }
    return acc;
  };

  SingularTailResult res;
  res.value.assign(nc, 0.0);
  res.bound.assign(nc, 0.0);
  const double len = sing - far;
  double floor_min = 1e300;
  for (double f : floor_radii) floor_min = std::min(floor_min, f);
  std::vector<double> remaining(nc, 0.0);
  int j = 0;
  for (; j < max_panels; ++j) {
    double lo = sing - len * std::pow(2.0, -j);
    double hi = sing - len * std::pow(2.0, -(j + 1));
    if (!(lo < hi) || !(hi < sing)) break;  // panel narrower than an ulp of sing
    VecEval pv = midpoint_panel(integrand, lo, hi, rel_tol, 5);
    for (std::size_t i = 0; i < nc; ++i) {
      res.value[i] += pv.value[i];
      res.bound[i] += pv.cap[i];
    }
    const double next_len = len * std::pow(2.0, -(j + 1));
    double tailw = scale_decay_integral(psi, next_len, delta);
    bool done = true;
    for (std::size_t i = 0; i < nc; ++i) {
      double floor_i = std::max(floor_radii[i], 1e-300);
      double rem_cs = cd * wref * std::pow(floor_i, -delta) * tailw;
      remaining[i] = std::min(rem_cs, extrapolated_remainder(next_len, floor_i));
      if (remaining[i] > rel_tol * (res.value[i] + remaining[i])) done = false;
    }
    if (done) {
      ++j;
      break;
    }
    // Once every threshold has left the grid for all remaining lapses, later
    // panels contribute nothing on-grid; the remainder estimate covers them.
    if (scaling_factor(psi, next_len) * floor_min >
        qgrid.half_extent * std::sqrt(static_cast<double>(qgrid.dim))) {
      ++j;
      break;
    }
  }
  for (std::size_t i = 0; i < nc; ++i) res.bound[i] += remaining[i];
  res.panels = j;
  return res;
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double weighted_l2(const KernelSnapshot& snap, double delta) {
  const GridSpec& g = snap.grid;
  const double vol = g.cell_volume();
  const double expo = g.dim / 2.0 + delta;
  double acc = 0.0;
  std::array<double, 3> x{};
  for (long f = 0; f < g.total_points(); ++f) {
    g.coordinate_at(f, x);
    double r = euclid(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim)));
    double w = std::pow(r, expo) * std::abs(snap.values[static_cast<std::size_t>(f)]);
    acc += w * w * vol;
  }
  return std::sqrt(acc);
}

}  // namespace

double scaling_factor(const Bernstein& psi, double tau) {
  if (!(tau > 0.0)) throw ConfigurationError("scaling factor: duration must be positive");
  return std::sqrt(psi.inverse(1.0 / tau));
}

double inverse_modulus(const Bernstein& psi, double tau) {
  return 1.0 / scaling_factor(psi, tau);
}

std::string kernel_which_name(KernelWhich w) {
  switch (w) {
    case KernelWhich::P: return "p";
    case KernelWhich::PsiDeltaP: return "psidp";
    case KernelWhich::Q1: return "q1";
    case KernelWhich::Q2: return "q2";
    default: return "q3";
  }
}

double KernelSnapshot::mass() const {
  std::vector<double> re(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real();
  return pairwise_sum(re) * grid.cell_volume();
}

double KernelSnapshot::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double KernelSnapshot::max_imag() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

KernelSnapshot compute_kernel(const Symbol& symbol, const Bernstein* psi, double s, double t,
                              const GridSpec& grid, KernelWhich which, int axis) {
  if (symbol.dim() != grid.dim)
    throw ConfigurationError("kernel: symbol dimension does not match the grid");
  if (!(s >= 0.0) || !(t > s)) throw ConfigurationError("kernel: requires 0 <= s < t");
  if (which != KernelWhich::P && psi == nullptr)
    throw ConfigurationError("kernel " + kernel_which_name(which) + ": needs a modulus psi");
  if (which == KernelWhich::Q2 && (axis < 0 || axis >= grid.dim))
    throw ConfigurationError("kernel q2: axis out of range");

  double a = 1.0;
  if (which == KernelWhich::Q1 || which == KernelWhich::Q2 || which == KernelWhich::Q3)
    a = scaling_factor(*psi, t - s);
  Multiplier m{&symbol, psi, s, t, a, which, axis};

  const int dim = grid.dim;
  const int mpts = grid.points_per_axis;
  const long total = grid.total_points();
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(total));

  auto fill = [&](long f) {
    std::array<int, 3> idx;
    grid.unflatten(f, idx);
    std::array<double, 3> xi{};
    int parity = 0;
    for (int i = 0; i < dim; ++i) {
      xi[i] = grid.frequency(idx[i]);
      parity += idx[i];
    }
    std::complex<double> v = m(xi, dim);
    buf[static_cast<std::size_t>(f)] = (parity & 1) ? -v : v;
  };
  if (total >= 8192)
    parallel_for(total, fill);
  else
    for (long f = 0; f < total; ++f) fill(f);

  double shell_max = 0.0;
  const int half = mpts / 2;
  std::array<int, 3> idx;
  for (long f = 0; f < total; ++f) {
    grid.unflatten(f, idx);
    bool on_shell = false;
    for (int i = 0; i < dim; ++i) {
      int k = grid.signed_index(idx[i]);
      if (std::abs(k) >= half - 1) on_shell = true;
    }
    if (on_shell) shell_max = std::max(shell_max, std::abs(buf[static_cast<std::size_t>(f)]));
  }
  if (shell_max > kShellTol) throw_resolution(m, grid, shell_max);

  fft_nd(buf, dim, mpts, true);
  double scale = std::pow(mpts / (2.0 * grid.half_extent), dim);
  for (auto& v : buf) v *= scale;

  KernelSnapshot snap;
  snap.grid = grid;
  snap.s = s;
  snap.t = t;
  snap.which = which;
  snap.axis = axis;
  snap.scaling = a;
  snap.symbol = symbol.label();
  snap.values = std::move(buf);
  return snap;
}

ScaledKernels compute_scaled_kernels(const Symbol& symbol, const Bernstein& psi, double s, double t,
                                     const GridSpec& grid) {
  ScaledKernels out;
  out.q1 = compute_kernel(symbol, &psi, s, t, grid, KernelWhich::Q1);
  out.q2.reserve(static_cast<std::size_t>(grid.dim));
  for (int axis = 0; axis < grid.dim; ++axis)
    out.q2.push_back(compute_kernel(symbol, &psi, s, t, grid, KernelWhich::Q2, axis));
  out.q3 = compute_kernel(symbol, &psi, s, t, grid, KernelWhich::Q3);
  return out;
}

RadialProfile::RadialProfile(const KernelSnapshot& snap, double delta)
    : delta_(delta), dim_(snap.grid.dim) {
  const GridSpec& g = snap.grid;
  const long total = g.total_points();
  const double vol = g.cell_volume();
  face_ = g.half_extent;
  std::vector<std::pair<double, double>> cells(static_cast<std::size_t>(total));
  std::array<double, 3> x{};
  for (long f = 0; f < total; ++f) {
    g.coordinate_at(f, x);
    double r = euclid(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim)));
    cells[static_cast<std::size_t>(f)] = {r, std::abs(snap.values[static_cast<std::size_t>(f)]) * vol};
  }
  std::sort(cells.begin(), cells.end());
  radius_.resize(cells.size());
  suffix_abs_.resize(cells.size());
  double acc = 0.0;
  double w2 = 0.0;
  const double expo = g.dim / 2.0 + delta;
  for (std::size_t i = cells.size(); i-- > 0;) {
    radius_[i] = cells[i].first;
    acc += cells[i].second;
    suffix_abs_[i] = acc;
    double w = std::pow(cells[i].first, expo) * cells[i].second;  // = r^e |q| vol
    w2 += w * w / vol;                                            // (r^e |q|)^2 vol
  }
  weighted_norm_ = std::sqrt(w2);
  max_radius_ = radius_.empty() ? 0.0 : radius_.back();

  // Octave-decay extrapolation anchored at half the face: the outermost
  // octave is contaminated by the periodic wrap of the opposite tail, the
  // inner octaves much less so. With per-octave ratio g the mass beyond the
  // face is m_a * g^2 / (1 - g) (exact for power-law tails).
  corners_ = tail(face_);
  const double m_a = tail(0.25 * face_) - tail(0.5 * face_);
  const double m_b = tail(0.125 * face_) - tail(0.25 * face_);
  if (m_a <= 0.0 || m_b <= 0.0) {
    extrap_ = 0.0;
    octave_g_ = 0.5;
  } else {
    const double g = std::min(m_a / m_b, 0.9);
    octave_g_ = std::max(g, 1.0 / 1024.0);
    extrap_ = m_a * g * g / (1.0 - g);
  }
}

double RadialProfile::tail(double radius) const {
  auto it = std::lower_bound(radius_.begin(), radius_.end(), radius);
  if (it == radius_.end()) return 0.0;
  return suffix_abs_[static_cast<std::size_t>(it - radius_.begin())];
}

double RadialProfile::total() const { return suffix_abs_.empty() ? 0.0 : suffix_abs_.front(); }

double RadialProfile::outside_box_bound() const { return corners_ + extrap_; }

double RadialProfile::unresolved_beyond(double radius) const {
  if (extrap_ <= 0.0) return 0.0;
  if (radius <= face_) return extrap_;
  return extrap_ * std::pow(radius / face_, std::log2(octave_g_));
}

KernelBoundsReport verify_kernel_bounds(const Symbol& symbol, const Bernstein& psi,
                                        std::span<const std::pair<double, double>> pairs,
                                        const GridSpec& grid, double delta) {
  const double dmax = std::min(psi.delta_lo(), 0.5);
  if (!(delta > 0.0) || !(delta < dmax))
    throw ConfigurationError("kernel bounds: delta must lie in (0, " + std::to_string(dmax) +
                             ") = (0, min(delta_lo, 1/2))");
  if (pairs.empty()) throw ConfigurationError("kernel bounds: need at least one (s, t) pair");

  KernelBoundsReport rep;
  rep.delta = delta;
  std::size_t worst = 0;
  double worst_sup = -1.0;
  bool finite = true;

  for (const auto& [s, t] : pairs) {
    ScaledKernels ks = compute_scaled_kernels(symbol, psi, s, t, grid);
    KernelBoundsRow row;
    row.s = s;
    row.t = t;
    row.scaling = ks.q1.scaling;
    row.sup_q1 = ks.q1.max_abs();
    for (const auto& q2 : ks.q2) row.sup_q2 = std::max(row.sup_q2, q2.max_abs());
    row.sup_q3 = ks.q3.max_abs();
    row.w_q1 = weighted_l2(ks.q1, delta);
    for (const auto& q2 : ks.q2) row.w_q2 = std::max(row.w_q2, weighted_l2(q2, delta));
    row.w_q3 = weighted_l2(ks.q3, delta);
    for (double v : {row.sup_q1, row.sup_q2, row.sup_q3, row.w_q1, row.w_q2, row.w_q3})
      finite = finite && std::isfinite(v);
    double sup = std::max({row.sup_q1, row.sup_q2, row.sup_q3});
    if (sup > worst_sup) {
      worst_sup = sup;
      worst = rep.rows.size();
    }
    rep.sup_bound = std::max(rep.sup_bound, sup);
    rep.weighted_bound = std::max({rep.weighted_bound, row.w_q1, row.w_q2, row.w_q3});
    rep.rows.push_back(row);
  }

  const KernelBoundsRow& wr = rep.rows[worst];
  GridSpec finer(grid.dim, grid.half_extent, grid.points_per_axis * 2);
  GridSpec wider(grid.dim, grid.half_extent * 2.0, grid.points_per_axis * 2);
  ScaledKernels kf = compute_scaled_kernels(symbol, psi, wr.s, wr.t, finer);
  ScaledKernels kw = compute_scaled_kernels(symbol, psi, wr.s, wr.t, wider);
  rep.sup_refined = std::max({kf.q1.max_abs(), kf.q3.max_abs()});
  for (const auto& q2 : kf.q2) rep.sup_refined = std::max(rep.sup_refined, q2.max_abs());
  rep.weighted_refined = std::max(weighted_l2(kw.q1, delta), weighted_l2(kw.q3, delta));
  for (const auto& q2 : kw.q2) rep.weighted_refined = std::max(rep.weighted_refined, weighted_l2(q2, delta));

  double base_sup = std::max({wr.sup_q1, wr.sup_q2, wr.sup_q3});
  double base_w = std::max({wr.w_q1, wr.w_q2, wr.w_q3});
  rep.sup_stable = std::abs(rep.sup_refined - base_sup) <= 0.2 * base_sup;
  rep.weighted_stable = std::abs(rep.weighted_refined - base_w) <= 0.2 * base_w;
  rep.pass = finite && rep.sup_stable && rep.weighted_stable;
  return rep;
}

TailDifferenceReport tail_and_difference_estimates(const Symbol& symbol, const Bernstein& psi,
                                                   double a_cut, double s, double t,
                                                   std::span<const double> c_values,
                                                   std::span<const double> h_values,
                                                   std::span<const double> t2_values,
                                                   const TailDifferenceOptions& opts) {
  if (!(t > s) || !(s > a_cut) || !(a_cut > 0.0))
    throw ConfigurationError("tail estimates: require t > s > a > 0");
  if (c_values.empty() || h_values.empty() || t2_values.empty())
    throw ConfigurationError("tail estimates: empty parameter sweep");
  for (double c : c_values)
    if (!(c > 0.0)) throw ConfigurationError("tail estimates: thresholds must be positive");
  for (double t2 : t2_values)
    if (!(t2 > s)) throw ConfigurationError("tail estimates: difference times must exceed s");
  if (opts.direct_grid.dim != symbol.dim() || opts.scaled_grid.dim != symbol.dim())
    throw ConfigurationError("tail estimates: grid dimension mismatch");

  double delta = opts.delta;
  double dmax = std::min(psi.delta_lo(), 0.5);
  if (delta == 0.0) delta = 0.45 * dmax;
  if (!(delta > 0.0) || !(delta < dmax))
    throw ConfigurationError("tail estimates: delta must lie in (0, min(delta_lo, 1/2))");

  TailDifferenceReport rep;
  rep.s = s;
  rep.t = t;
  rep.a_cut = a_cut;
  rep.delta = delta;
  double cap_fraction = 0.0;

  {  // (1) mass of psi(D)p(r,t,.) beyond |z| >= c, r in (s, t)
    std::vector<double> cs(c_values.begin(), c_values.end());
    auto radii = [&](double) { return cs; };
    SingularTailResult st = singular_tail_integral(symbol, psi, s, t, radii, c_values,
                                                   opts.scaled_grid, delta, opts.rel_tol,
                                                   opts.max_panels);
    rep.tail.parameter = cs;
    rep.tail.lhs = st.value;
    double a_ts = scaling_factor(psi, t - s);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      rep.tail.rhs_shape.push_back(std::pow(a_ts * cs[i], -delta));
      if (st.value[i] + st.bound[i] > 0.0)
        cap_fraction = std::max(cap_fraction, st.bound[i] / (st.value[i] + st.bound[i]));
    }
  }

  const GridSpec& dg = opts.direct_grid;
  const double step = dg.step();
  const long total = dg.total_points();
  const double vol = dg.cell_volume();

  {  // (2) translation difference along the first axis, r in (0, a_cut)
    std::vector<long> shifts;
    std::vector<double> snapped;
    for (double h : h_values) {
      long cells = std::lround(h / step);
      shifts.push_back(cells);
      snapped.push_back(cells * step);
    }
    auto integrand = [&](double r) -> VecEval {
      KernelSnapshot k = compute_kernel(symbol, &psi, r, t, dg, KernelWhich::PsiDeltaP);
      RadialProfile prof(k, delta);
      VecEval out;
      out.cap.assign(shifts.size(), 2.0 * prof.outside_box_bound());
      std::array<int, 3> idx;
      for (long sh : shifts) {
        double acc = 0.0;
        for (long f = 0; f < total; ++f) {
          dg.unflatten(f, idx);
          idx[0] = static_cast<int>((idx[0] + sh) % dg.points_per_axis + dg.points_per_axis) %
                   dg.points_per_axis;
          acc += std::abs(k.values[static_cast<std::size_t>(dg.flatten(idx))] -
                          k.values[static_cast<std::size_t>(f)]) * vol;
        }
        out.value.push_back(acc);
      }
      return out;
    };
    VecEval tr = midpoint_panel(integrand, 0.0, a_cut, opts.rel_tol, 10, true);
    rep.translation.parameter = snapped;
    rep.translation.lhs = tr.value;
    double a_ta = scaling_factor(psi, t - a_cut);
    for (std::size_t i = 0; i < snapped.size(); ++i) {
      rep.translation.rhs_shape.push_back(std::abs(snapped[i]) * a_ta);
      if (tr.value[i] > 0.0)
        cap_fraction = std::max(cap_fraction, tr.cap[i] / (tr.value[i] + tr.cap[i]));
    }
  }

  {  // (3) anchor-time difference, r in (0, a_cut)
    auto integrand = [&](double r) -> VecEval {
      KernelSnapshot ks = compute_kernel(symbol, &psi, r, s, dg, KernelWhich::PsiDeltaP);
      double base_cap = RadialProfile(ks, delta).outside_box_bound();
      VecEval out;
      for (double t2 : t2_values) {
        KernelSnapshot kt = compute_kernel(symbol, &psi, r, t2, dg, KernelWhich::PsiDeltaP);
        double acc = 0.0;
        for (long f = 0; f < total; ++f)
          acc += std::abs(kt.values[static_cast<std::size_t>(f)] -
                          ks.values[static_cast<std::size_t>(f)]) * vol;
        out.value.push_back(acc);
        out.cap.push_back(base_cap + RadialProfile(kt, delta).outside_box_bound());
      }
      return out;
    };
    VecEval td = midpoint_panel(integrand, 0.0, a_cut, opts.rel_tol, 10, true);
    rep.time_diff.parameter.assign(t2_values.begin(), t2_values.end());
    rep.time_diff.lhs = td.value;
    for (std::size_t i = 0; i < t2_values.size(); ++i) {
      rep.time_diff.rhs_shape.push_back((t2_values[i] - s) / (s - a_cut));
      if (td.value[i] > 0.0)
        cap_fraction = std::max(cap_fraction, td.cap[i] / (td.value[i] + td.cap[i]));
    }
  }

  for (EstimateCurve* c : {&rep.tail, &rep.translation, &rep.time_diff}) {
    c->fitted_n = 0.0;
    for (std::size_t i = 0; i < c->lhs.size(); ++i)
      if (c->rhs_shape[i] > 0.0) c->fitted_n = std::max(c->fitted_n, c->lhs[i] / c->rhs_shape[i]);
  }
  rep.tail_bound_fraction = cap_fraction;
  return rep;
}

double fit_c_tilde0(const Bernstein& psi, double tau_min, double tau_max, int per_decade) {
  int decades = static_cast<int>(std::ceil(std::log10(tau_max / tau_min)));
  int n = decades * per_decade + 1;
  std::vector<double> tau(static_cast<std::size_t>(n)), phi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    tau[static_cast<std::size_t>(i)] =
        tau_min * std::pow(tau_max / tau_min, i / static_cast<double>(n - 1));
    phi[static_cast<std::size_t>(i)] = inverse_modulus(psi, tau[static_cast<std::size_t>(i)]);
  }
  double sup = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double num = inverse_modulus(psi, tau[static_cast<std::size_t>(i)] + tau[static_cast<std::size_t>(j)]);
      sup = std::max(sup, num / (phi[static_cast<std::size_t>(i)] + phi[static_cast<std::size_t>(j)]));
    }
  return sup;
}

HormanderResult hormander_integral(const Symbol& symbol, const Bernstein& psi, double t,
                                   std::span<const double> x, double s, std::span<const double> y,
                                   const HormanderOptions& opts) {
  const int dim = symbol.dim();
  if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
    throw ConfigurationError("hormander: point dimension mismatch");
  if (opts.direct_grid.dim != dim || opts.scaled_grid.dim != dim)
    throw ConfigurationError("hormander: grid dimension mismatch");
  if (!(t >= s) || !(s >= 0.0)) throw ConfigurationError("hormander: requires t >= s >= 0");

  double dmax = std::min(psi.delta_lo(), 0.5);
  double delta = opts.delta > 0.0 ? opts.delta : 0.45 * dmax;
  if (!(delta > 0.0) || !(delta < dmax))
    throw ConfigurationError("hormander: delta must lie in (0, min(delta_lo, 1/2))");

  HormanderResult res;
  res.c_tilde0 = fit_c_tilde0(psi);
  res.c0 = opts.c0 > 0.0 ? opts.c0 : 4.0 * res.c_tilde0;

  std::vector<double> dxy(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) dxy[static_cast<std::size_t>(i)] = x[i] - y[i];
  double dist = euclid(dxy);
  if (t == s && dist == 0.0) return res;
  double base = (t > s ? inverse_modulus(psi, t - s) : 0.0) + dist;
  res.base_scale = base;

  auto rho = [&](double r) { return res.c0 * base - inverse_modulus(psi, t - r); };

  const GridSpec& dg = opts.direct_grid;
  double value = 0.0, caps = 0.0;

  if (t > s) {  // zone 1: r in (s, t), only the t-anchored kernel survives
    auto radii = [&](double r) { return std::vector<double>{rho(r)}; };
    double floor1 = std::max(rho(s), 1e-3 * base);
    std::array<double, 1> fl{floor1};
    SingularTailResult z1 = singular_tail_integral(symbol, psi, s, t, radii, fl, opts.scaled_grid,
                                                   delta, opts.rel_tol, opts.max_panels);
    value += z1.value[0];
    caps += z1.bound[0];
  }

  if (s > 0.0) {
    // Resolution-limited split point: the direct grid must resolve the
    // s-anchored kernel down to lapse eps0.
    auto resolved_at = [&](double lapse) {
      Multiplier m{&symbol, &psi, s - lapse, s, 1.0, KernelWhich::PsiDeltaP, 0};
      return resolves(m, dg);
    };
    double eps0;
    if (!resolved_at(s)) {
      Multiplier m{&symbol, &psi, 0.0, s, 1.0, KernelWhich::PsiDeltaP, 0};
      throw_resolution(m, dg, nyquist_probe(m, dg, dg.points_per_axis));
    } else {
      double lo = s * 1e-12, hi = s;
      if (resolved_at(lo)) {
        eps0 = lo;
      } else {
        for (int it = 0; it < 60; ++it) {
          double mid = std::sqrt(lo * hi);
          (resolved_at(mid) ? hi : lo) = mid;
        }
        eps0 = hi;
      }
    }

    if (t > s) {  // the t-anchored kernel must be resolved down to r = s
      Multiplier m{&symbol, &psi, s, t, 1.0, KernelWhich::PsiDeltaP, 0};
      if (!resolves(m, dg)) throw_resolution(m, dg, nyquist_probe(m, dg, dg.points_per_axis));
    }

    const double step = dg.step();
    std::array<int, 3> shift{};
    for (int i = 0; i < dim; ++i) {
      double cells = (y[i] - x[i]) / step;
      shift[i] = static_cast<int>(std::lround(cells));
      if (std::abs(cells - shift[i]) > 1e-9)
        throw ConfigurationError("hormander: x - y must be a whole number of grid cells");
    }

    double r_top = s - eps0;
    if (r_top > 0.0) {  // zone 2: both kernels on the direct grid
      const long total = dg.total_points();
      const double vol = dg.cell_volume();
      auto integrand = [&](double r) -> VecEval {
        KernelSnapshot k1 = compute_kernel(symbol, &psi, r, t, dg, KernelWhich::PsiDeltaP);
        KernelSnapshot k2 = compute_kernel(symbol, &psi, r, s, dg, KernelWhich::PsiDeltaP);
        double cut = rho(r);
        double acc = 0.0;
        std::array<int, 3> idx;
        std::array<double, 3> w{};
        for (long f = 0; f < total; ++f) {
          dg.coordinate_at(f, w);
          double rr = euclid(std::span<const double>(w.data(), static_cast<std::size_t>(dim)));
          if (rr < cut) continue;
          dg.unflatten(f, idx);
          for (int i = 0; i < dim; ++i)
            idx[i] = ((idx[i] + shift[i]) % dg.points_per_axis + dg.points_per_axis) %
                     dg.points_per_axis;
          acc += std::abs(k1.values[static_cast<std::size_t>(f)] -
                          k2.values[static_cast<std::size_t>(dg.flatten(idx))]) * vol;
        }
        VecEval out;
        out.value.push_back(acc);
        out.cap.push_back(RadialProfile(k1, delta).outside_box_bound() +
                          RadialProfile(k2, delta).outside_box_bound());
        return out;
      };
      VecEval z2 = midpoint_panel(integrand, 0.0, r_top, opts.rel_tol, 8);
      value += z2.value[0];
      caps += z2.cap[0];
    }

    {  // zone 3: sliver r in (s - eps0, s), |K1 - K2| <= |K1| + |K2|
      double far = std::max(r_top, 0.0);
      double u2_floor = std::max(rho(far) - dist, 1e-3 * base);
      auto radii2 = [&](double r) { return std::vector<double>{std::max(rho(r) - dist, 0.0)}; };
      std::array<double, 1> fl2{u2_floor};
      SingularTailResult z3b = singular_tail_integral(symbol, psi, far, s, radii2, fl2,
                                                      opts.scaled_grid, delta, opts.rel_tol,
                                                      opts.max_panels);
      value += z3b.value[0];
      caps += z3b.bound[0];

      if (t > s) {  // K1 is regular here; integrate its tail directly
        auto integrand = [&](double r) -> VecEval {
          KernelSnapshot q1 = compute_kernel(symbol, &psi, r, t, opts.scaled_grid, KernelWhich::Q1);
          RadialProfile prof(q1, delta);
          double lapse = t - r;
          VecEval out;
          out.value.push_back(prof.tail(q1.scaling * std::max(rho(r), 0.0)) / lapse);
          out.cap.push_back(prof.outside_box_bound() / lapse);
          return out;
        };
        VecEval z3a = midpoint_panel(integrand, far, s, opts.rel_tol, 6);
        value += z3a.value[0];
        caps += z3a.cap[0];
      } else {  // t == s: same singular machinery around x
        double u1_floor = std::max(rho(far), 1e-3 * base);
        auto radii1 = [&](double r) { return std::vector<double>{std::max(rho(r), 0.0)}; };
        std::array<double, 1> fl1{u1_floor};
        SingularTailResult z3a = singular_tail_integral(symbol, psi, far, s, radii1, fl1,
                                                        opts.scaled_grid, delta, opts.rel_tol,
                                                        opts.max_panels);
        value += z3a.value[0];
        caps += z3a.bound[0];
      }
    }
  }

  res.value = value;
  res.tail_fraction = value + caps > 0.0 ? caps / (value + caps) : 0.0;
  // tail_fraction is an estimate, not a certificate; the operative accuracy
  // check is stability of the value under box doubling. Refuse only when the
  // estimated unresolved mass rivals the computed value itself.
  if (res.tail_fraction > 0.5)
    throw TruncationError("hormander: estimated unresolved-mass fraction " +
                              std::to_string(res.tail_fraction) +
                              " exceeds 50%; enlarge the integration box",
                          2.0 * dg.half_extent);
  return res;
}

TimeScalingSandwichReport verify_time_scaling_sandwich(const Bernstein& psi, int nt, int nxi,
                                                       double t_min, double t_max, double mag_min,
                                                       double mag_max) {
  TimeScalingSandwichReport rep;
  bool ok = true;
  double n_fit = 1.0;
  for (int i = 0; i < nt; ++i) {
    double tt = t_min * std::pow(t_max / t_min, nt == 1 ? 0.0 : i / static_cast<double>(nt - 1));
    double at = scaling_factor(psi, tt);
    for (int j = 0; j < nxi; ++j) {
      double mag =
          mag_min * std::pow(mag_max / mag_min, nxi == 1 ? 0.0 : j / static_cast<double>(nxi - 1));
      double lam = at * mag;
      double v = tt * psi(lam * lam);
      double lo_exp = mag >= 1.0 ? 2.0 * psi.delta_lo() : 2.0 * psi.delta_hi();
      double hi_exp = mag >= 1.0 ? 2.0 * psi.delta_hi() : 2.0 * psi.delta_lo();
      SandwichRow row{tt, mag, v, std::pow(mag, lo_exp), std::pow(mag, hi_exp)};
      rep.rows.push_back(row);
      if (!(v > 0.0) || !std::isfinite(v)) {
        ok = false;
        continue;
      }
      n_fit = std::max({n_fit, row.lower_shape / v, v / row.upper_shape});
    }
  }
  rep.n_fit = n_fit;
  rep.pass = ok && std::isfinite(n_fit) && n_fit <= 1e6;
  return rep;
}

InverseSandwichReport verify_inverse_sandwich(const Bernstein& psi, double tau_min, double tau_max,
                                              int per_decade) {
  InverseSandwichReport rep;
  int decades = static_cast<int>(std::ceil(std::log10(tau_max / tau_min)));
  int n = decades * per_decade + 1;
  double n_fit = 1.0;
  bool upper = true;
  for (int i = 0; i < n; ++i) {
    double tau = tau_min * std::pow(tau_max / tau_min, i / static_cast<double>(n - 1));
    double rt = psi.inverse(psi(tau));
    upper = upper && rt <= tau * (1.0 + 1e-9);
    if (rt > 0.0) n_fit = std::max(n_fit, tau / rt);
    double v = psi(tau);  // reuse the value grid for the forward direction
    double fwd = psi(psi.inverse(v));
    n_fit = std::max({n_fit, fwd / v, v / fwd});
  }
  rep.n_fit = n_fit;
  rep.upper_ok = upper;
  rep.pass = upper && std::isfinite(n_fit) && n_fit <= 1.01;
  return rep;
}

}  // namespace jumpdiff
