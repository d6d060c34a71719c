#include "jumpdiff/solver.hpp"

#include <algorithm>
#include <cmath>

#include "jumpdiff/fft.hpp"
#include "jumpdiff/rng.hpp"

namespace jumpdiff {

namespace {

std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1e-2) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
  return (std::exp(z) - 1.0) / z;
}

void level_fft(SpaceTimeField& fld, bool inverse) {
  const int dim = fld.grid.dim;
  const int m = fld.grid.points_per_axis;
  parallel_for(fld.steps + 1, [&](long k) {
    auto lv = fld.level(static_cast<int>(k));
    std::vector<std::complex<double>> tmp(lv.begin(), lv.end());
    fft_nd(tmp, dim, m, inverse);
    std::copy(tmp.begin(), tmp.end(), lv.begin());
  });
}

double level_sum(std::span<const double> v) { return pairwise_sum(v); }

// sum of w(a_j, b_j) over one level, pairwise for determinism
template <typename F>
double reduce_level(long n, F&& term) {
  std::vector<double> buf(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = term(j);
  return level_sum(buf);
}

double bump(double y) {
  double y2 = y * y;
  if (y2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - y2));
}

double bump_deriv(double y) {
  double y2 = y * y;
  if (y2 >= 1.0) return 0.0;
  double om = 1.0 - y2;
  return bump(y) * (-2.0 * y) / (om * om);
}

void check_compatible(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (!(a.grid == b.grid) || a.steps != b.steps || a.t_final != b.t_final)
    throw ConfigurationError("fields live on different space-time grids");
}

}  // namespace

SpaceTimeField solve(const Symbol& symbol, const SpaceTimeField& f) {
  const GridSpec& g = f.grid;
  if (symbol.dim() != g.dim) throw ConfigurationError("solve: symbol dimension mismatch");
  const int steps = f.steps;
  const long n = g.total_points();
  const double dt = f.dt();

  SpaceTimeField fh = f;
  level_fft(fh, false);
  SpaceTimeField uh(g, steps, f.t_final);

  parallel_for(n, [&](long idx) {
    std::array<double, 3> xi{};
    g.frequency_at(idx, xi);
    std::span<const double> xis(xi.data(), static_cast<std::size_t>(g.dim));
    std::complex<double> v = 0.0;
    for (int k = 0; k < steps; ++k) {
      std::complex<double> phi_step = symbol.accumulated(f.time(k), f.time(k + 1), xis);
      if (phi_step.real() > 1e-8)
        throw InstabilityError("solve: symbol is not dissipative, Re Phi = " +
                               std::to_string(phi_step.real()) + " on a mode");
      std::complex<double> w = dt * phi1(phi_step);
      v = std::exp(phi_step) * v +
          w * 0.5 * (fh.level(k)[static_cast<std::size_t>(idx)] +
                     fh.level(k + 1)[static_cast<std::size_t>(idx)]);
      uh.level(k + 1)[static_cast<std::size_t>(idx)] = v;
    }
  });

  level_fft(uh, true);
  return uh;
}

SpaceTimeField apply_multiplier(
    const SpaceTimeField& field,
    const std::function<std::complex<double>(double, std::span<const double>)>& m) {
  SpaceTimeField out = field;
  level_fft(out, false);
  const GridSpec& g = out.grid;
  parallel_for(out.steps + 1, [&](long k) {
    double t = out.time(static_cast<int>(k));
    auto lv = out.level(static_cast<int>(k));
    std::array<double, 3> xi{};
    for (long idx = 0; idx < g.total_points(); ++idx) {
      g.frequency_at(idx, xi);
      lv[static_cast<std::size_t>(idx)] *=
          m(t, std::span<const double>(xi.data(), static_cast<std::size_t>(g.dim)));
    }
  });
  level_fft(out, true);
  return out;
}

SpaceTimeField apply_phi_multiplier(const SpaceTimeField& field, const Bernstein& phi) {
  return apply_multiplier(field, [&phi](double, std::span<const double> xi) {
    double lam = 0.0;
    for (double v : xi) lam += v * v;
    return std::complex<double>(lam > 0.0 ? phi(lam) : phi.at_zero(), 0.0);
  });
}

SpaceTimeField apply_symbol_multiplier(const SpaceTimeField& field, const Symbol& symbol) {
  if (symbol.dim() != field.grid.dim)
    throw ConfigurationError("apply: symbol dimension mismatch");
  return apply_multiplier(
      field, [&symbol](double t, std::span<const double> xi) { return symbol.psi(t, xi); });
}

double lp_space_time_norm(const SpaceTimeField& field, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw ConfigurationError("norm: exponent must be finite and >= 1");
  const long n = field.points();
  std::vector<double> per_level(static_cast<std::size_t>(field.steps) + 1);
  for (int k = 0; k <= field.steps; ++k) {
    auto lv = field.level(k);
    per_level[static_cast<std::size_t>(k)] =
        reduce_level(n, [&](long j) { return std::pow(std::abs(lv[static_cast<std::size_t>(j)]), p); });
  }
  double total = pairwise_sum(per_level) * field.grid.cell_volume() * field.dt();
  return std::pow(total, 1.0 / p);
}

NormReport phi_potential_norm(const SpaceTimeField& u, const Bernstein& phi, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ConfigurationError("potential norm: exponent must lie in (1, inf)");
  NormReport rep;
  rep.p = p;
  rep.u_norm = lp_space_time_norm(u, p);
  rep.phi_u_norm = lp_space_time_norm(apply_phi_multiplier(u, phi), p);
  return rep;
}

namespace {

double field_dot(const SpaceTimeField& a, const SpaceTimeField& b) {
  const long n = a.points();
  std::vector<double> per_level(static_cast<std::size_t>(a.steps) + 1);
  for (int k = 0; k <= a.steps; ++k) {
    auto la = a.level(k);
    auto lb = b.level(k);
    per_level[static_cast<std::size_t>(k)] = reduce_level(n, [&](long j) {
      return la[static_cast<std::size_t>(j)].real() * lb[static_cast<std::size_t>(j)].real();
    });
  }
  return pairwise_sum(per_level) * a.grid.cell_volume() * a.dt();
}

}  // namespace

double weak_residual(const SpaceTimeField& u, const SpaceTimeField& f, const Symbol& symbol,
                     const WeakResidualOptions& opts) {
  check_compatible(u, f);
  if (symbol.dim() != u.grid.dim) throw ConfigurationError("residual: symbol dimension mismatch");
  const GridSpec& g = u.grid;
  const double T = u.t_final;
  const double L = g.half_extent;
  const long n = g.total_points();

  double u_norm = lp_space_time_norm(u, 2.0);
  double f_norm = lp_space_time_norm(f, 2.0);
  if (u_norm + f_norm == 0.0) return 0.0;

  auto conj_symbol = [&symbol](double t, std::span<const double> xi) {
    return std::conj(symbol.psi(t, xi));
  };

  double worst = 0.0;
  for (int sc = 0; sc < opts.scales; ++sc) {
    double factor = std::pow(0.5, sc);
    double rt = 0.3 * T * factor;
    double rx = 0.45 * L * factor;
    for (int ce = 0; ce < opts.centers; ++ce) {
      Rng rng(Rng::derive(opts.seed, static_cast<std::uint64_t>(sc * opts.centers + ce)));
      double ct_lo = rt + 0.02 * T, ct_hi = T - rt - 0.02 * T;
      double ct = ct_lo + rng.uniform() * (ct_hi - ct_lo);
      std::array<double, 3> cx{};
      for (int i = 0; i < g.dim; ++i) {
        double span = L - rx - 0.02 * L;
        cx[i] = -span + rng.uniform() * 2.0 * span;
      }

      SpaceTimeField zeta(g, u.steps, T);
      SpaceTimeField zeta_t(g, u.steps, T);
      std::array<double, 3> x{};
      for (int k = 0; k <= u.steps; ++k) {
        double yt = (u.time(k) - ct) / rt;
        double bt = bump(yt);
        double bt_d = bump_deriv(yt) / rt;
        auto lz = zeta.level(k);
        auto lzt = zeta_t.level(k);
        if (bt == 0.0 && bt_d == 0.0) continue;
        for (long j = 0; j < n; ++j) {
          g.coordinate_at(j, x);
          double bx = 1.0;
          for (int i = 0; i < g.dim; ++i) bx *= bump((x[i] - cx[i]) / rx);
          lz[static_cast<std::size_t>(j)] = bt * bx;
          lzt[static_cast<std::size_t>(j)] = bt_d * bx;
        }
      }

      SpaceTimeField azeta = apply_multiplier(zeta, conj_symbol);
      double zeta_norm = lp_space_time_norm(zeta, 2.0);
      if (zeta_norm == 0.0) continue;
      double num = std::abs(field_dot(u, zeta_t) + field_dot(u, azeta) + field_dot(f, zeta));
      worst = std::max(worst, num / (zeta_norm * (u_norm + f_norm)));
    }
  }
  return worst;
}

EstimateTable estimate_ratio_harness(const Symbol& symbol, const Bernstein& phi,
                                     std::span<const double> p_list, std::span<const int> ladder,
                                     const EstimateOptions& opts) {
  if (p_list.empty() || ladder.empty())
    throw ConfigurationError("estimate: need at least one exponent and one resolution");
  for (double p : p_list)
    if (!(p > 1.0)) throw ConfigurationError("estimate: exponents must exceed 1");
  const int dim = symbol.dim();
  const double T = opts.t_final;

  struct Mode {
    std::array<int, 3> k;
    std::complex<double> amp;
    double omega, theta;
  };

  EstimateTable table;
  for (int src = 0; src < opts.n_sources; ++src) {
    Rng rng(Rng::derive(opts.seed, static_cast<std::uint64_t>(src)));
    std::vector<Mode> modes(static_cast<std::size_t>(opts.modes));
    for (auto& md : modes) {
      md.k = {0, 0, 0};
      for (int i = 0; i < dim; ++i) {
        int span = 2 * opts.band + 1;
        md.k[i] = static_cast<int>(rng.uniform() * span) - opts.band;
      }
      md.amp = std::complex<double>(rng.normal(), rng.normal()) / std::sqrt(double(opts.modes));
      md.omega = (2.0 * kPi / T) * static_cast<int>(rng.uniform() * 4.0);
      md.theta = rng.uniform() * 2.0 * kPi;
    }

    for (int m : ladder) {
      GridSpec grid(dim, opts.half_extent, m);
      const long n = grid.total_points();
      // spatial pattern of each mode, sampled once
      std::vector<std::vector<double>> pattern(modes.size(),
                                               std::vector<double>(static_cast<std::size_t>(n)));
      std::array<double, 3> x{};
      for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        for (long j = 0; j < n; ++j) {
          grid.coordinate_at(j, x);
          double kx = 0.0;
          for (int i = 0; i < dim; ++i) kx += modes[mi].k[i] * grid.freq_step() * x[i];
          pattern[mi][static_cast<std::size_t>(j)] =
              (modes[mi].amp * std::exp(std::complex<double>(0.0, kx))).real();
        }
      }
      SpaceTimeField f(grid, m, T);
      for (int k = 0; k <= m; ++k) {
        auto lv = f.level(k);
        double t = f.time(k);
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          double gmt = std::cos(modes[mi].omega * t + modes[mi].theta);
          for (long j = 0; j < n; ++j)
            lv[static_cast<std::size_t>(j)] += pattern[mi][static_cast<std::size_t>(j)] * gmt;
        }
      }

      SpaceTimeField u = solve(symbol, f);
      for (double p : p_list) {
        NormReport nr = phi_potential_norm(u, phi, p);
        EstimateRow row;
        row.source = src;
        row.p = p;
        row.m = m;
        row.f_norm = lp_space_time_norm(f, p);
        row.u_norm = nr.u_norm;
        row.phi_u_norm = nr.phi_u_norm;
        row.ratio = row.f_norm > 0.0 ? row.phi_u_norm / row.f_norm : 0.0;
        table.rows.push_back(row);
      }
    }
  }

  for (double p : p_list)
    for (int m : ladder) {
      EstimateSummaryRow srow{p, m, 0.0};
      for (const auto& row : table.rows)
        if (row.p == p && row.m == m) srow.max_ratio = std::max(srow.max_ratio, row.ratio);
      table.summary.push_back(srow);
    }
  return table;
}

}  // namespace jumpdiff
