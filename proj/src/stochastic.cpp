#include "jumpdiff/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include "jumpdiff/common.hpp"
#include "jumpdiff/grid.hpp"

namespace jumpdiff {

namespace {

// Subordinator increment over duration dt for the sampling-supported kinds.
double subordinator_increment(const Bernstein& phi, double dt, Rng& rng) {
  if (dt <= 0.0) return 0.0;
  switch (phi.kind()) {
    case Bernstein::Kind::Linear:
      return dt;
    case Bernstein::Kind::Stable:
      return sample_stable_subordinator(phi.param_a(), dt, rng);
    default:
      throw ConfigurationError(
          "sampling requires a stable or linear Laplace exponent, got " + phi.label());
  }
}

void require_samplable(const Process& p) {
  if (p.dim < 1 || p.dim > 3)
    throw ConfigurationError("process dimension must be 1, 2, or 3");
  if (p.phi.kind() != Bernstein::Kind::Stable && p.phi.kind() != Bernstein::Kind::Linear)
    throw ConfigurationError(
        "sampling requires a stable or linear Laplace exponent, got " + p.phi.label());
  if (p.modulation.min_value() <= 0.0)
    throw ConfigurationError("process modulation must stay positive");
  if (!p.drift.empty() && static_cast<int>(p.drift.size()) != p.dim)
    throw ConfigurationError("drift needs one rate function per coordinate");
  if (p.cp_rate < 0.0) throw ConfigurationError("compound Poisson rate must be >= 0");
  if (p.cp_rate > 0.0 && p.cp_jump_half_width <= 0.0)
    throw ConfigurationError("compound Poisson jumps need a positive half-width");
}

}  // namespace

double sample_stable_subordinator(double alpha, double dt, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigurationError("stable subordinator needs alpha in (0, 1)");
  if (dt < 0.0) throw ConfigurationError("subordinator duration must be >= 0");
  if (dt == 0.0) return 0.0;
  const double u = rng.uniform() * kPi;
  const double e = rng.exponential();
  const double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) *
                   std::sin((1.0 - alpha) * u) /
                   std::pow(std::sin(u), 1.0 / (1.0 - alpha));
  const double unit = std::pow(a / e, (1.0 - alpha) / alpha);
  return std::pow(dt, 1.0 / alpha) * unit;
}

Process make_sbm_process(Bernstein phi, PiecewiseConstant sigma, int dim, std::string id) {
  Process p;
  p.base = Process::Base::SbmModulated;
  p.phi = std::move(phi);
  p.modulation = std::move(sigma);
  p.dim = dim;
  p.id = std::move(id);
  require_samplable(p);
  return p;
}

Process make_clock_process(Bernstein phi, PiecewiseConstant a, int dim, std::string id) {
  Process p;
  p.base = Process::Base::AdditiveClock;
  p.phi = std::move(phi);
  p.modulation = std::move(a);
  p.dim = dim;
  p.id = std::move(id);
  require_samplable(p);
  return p;
}

Process with_drift(Process p, std::vector<PiecewiseConstant> drift) {
  p.drift = std::move(drift);
  require_samplable(p);
  return p;
}

Process with_compound_poisson(Process p, double rate, double jump_half_width) {
  p.cp_rate = rate;
  p.cp_jump_half_width = jump_half_width;
  require_samplable(p);
  return p;
}

SymbolPtr process_symbol(const Process& process) {
  require_samplable(process);
  SymbolPtr base = process.base == Process::Base::SbmModulated
                       ? make_sbm_symbol(process.phi, process.modulation, process.dim)
                       : make_clock_symbol(process.phi, process.modulation, process.dim);
  if (!process.drift.empty())
    base = make_sum_symbol(base, make_drift_symbol(process.drift, process.dim));
  if (process.cp_rate > 0.0)
    base = make_sum_symbol(base, make_compound_poisson_symbol(
                                     process.cp_rate, process.cp_jump_half_width, process.dim));
  return base;
}

std::vector<double> sample_increment(const Process& process, double s, double t, Rng& rng) {
  require_samplable(process);
  if (t < s) throw ConfigurationError("increment endpoints out of order");
  std::vector<double> x(static_cast<std::size_t>(process.dim), 0.0);
  if (t == s) return x;

  if (process.base == Process::Base::SbmModulated) {
    // Split at sigma's knots so each piece has a constant factor.
    std::vector<double> edges = process.modulation.breakpoints_within(s, t);
    edges.push_back(t);
    double left = s;
    for (double right : edges) {
      const double sig = process.modulation(0.5 * (left + right));
      const double inc = subordinator_increment(process.phi, right - left, rng);
      if (inc > 0.0) {
        const double sd = std::sqrt(2.0 * inc);
        for (int i = 0; i < process.dim; ++i) x[static_cast<std::size_t>(i)] += sig * sd * rng.normal();
      }
      left = right;
    }
  } else {
    // Additive clock: one subordinator increment over the accumulated clock.
    const double duration = process.modulation.integrate(s, t);
    const double inc = subordinator_increment(process.phi, duration, rng);
    if (inc > 0.0) {
      const double sd = std::sqrt(2.0 * inc);
      for (int i = 0; i < process.dim; ++i) x[static_cast<std::size_t>(i)] += sd * rng.normal();
    }
  }

  for (std::size_t i = 0; i < process.drift.size(); ++i)
    x[i] += process.drift[i].integrate(s, t);

  if (process.cp_rate > 0.0) {
    const long jumps = rng.poisson(process.cp_rate * (t - s));
    for (long j = 0; j < jumps; ++j)
      for (int i = 0; i < process.dim; ++i)
        x[static_cast<std::size_t>(i)] +=
            rng.uniform(-process.cp_jump_half_width, process.cp_jump_half_width);
  }
  return x;
}

CfEstimate empirical_cf(std::span<const std::vector<double>> samples,
                        std::span<const double> xi) {
  if (samples.empty()) throw ConfigurationError("empirical cf needs at least one sample");
  const std::size_t d = xi.size();
  const std::size_t n = samples.size();
  std::vector<double> re(n), im(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (samples[p].size() != d)
      throw ConfigurationError("sample dimension does not match frequency");
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += xi[i] * samples[p][i];
    re[p] = std::cos(dot);
    im[p] = std::sin(dot);
  }
  CfEstimate est;
  est.value = {pairwise_sum(re) / static_cast<double>(n),
               pairwise_sum(im) / static_cast<double>(n)};
  est.std_error = 1.0 / std::sqrt(static_cast<double>(n));
  return est;
}

CfReport verify_cf(const Process& process, const Symbol& symbol,
                   std::span<const std::pair<double, double>> pairs,
                   std::span<const std::vector<double>> xis, long n, std::uint64_t seed) {
  require_samplable(process);
  if (process.dim != symbol.dim())
    throw ConfigurationError("process and symbol dimensions differ");
  if (pairs.empty() || xis.empty()) throw ConfigurationError("verify cf needs pairs and frequencies");
  if (n < 1) throw ConfigurationError("verify cf needs at least one sample");
  for (const auto& xi : xis)
    if (static_cast<int>(xi.size()) != process.dim)
      throw ConfigurationError("frequency dimension does not match the process");

  CfReport report;
  report.n_samples = n;
  const double tol = 3.0 / std::sqrt(static_cast<double>(n)) + 1e-12;

  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [s, t] = pairs[pi];
    if (!(0.0 <= s && s <= t)) throw ConfigurationError("time pairs must satisfy 0 <= s <= t");
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(n));
    const std::uint64_t pair_seed = Rng::derive(seed, pi);
    parallel_for(n, [&](long p) {
      Rng rng(Rng::derive(pair_seed, static_cast<std::uint64_t>(p)));
      samples[static_cast<std::size_t>(p)] = sample_increment(process, s, t, rng);
    });
    for (const auto& xi : xis) {
      CfRow row;
      row.s = s;
      row.t = t;
      row.xi = xi;
      const CfEstimate est = empirical_cf(samples, xi);
      row.empirical = est.value;
      row.oracle = std::exp(symbol.accumulated(s, t, xi));
      row.normalized_dev = std::abs(row.empirical - row.oracle) / tol;
      report.rows.push_back(std::move(row));
    }
  }

  long within = 0;
  for (const auto& row : report.rows) {
    report.max_dev = std::max(report.max_dev, row.normalized_dev);
    if (row.normalized_dev <= 1.0) ++within;
  }
  report.within_fraction =
      static_cast<double>(within) / static_cast<double>(report.rows.size());
  report.pass = report.within_fraction >= 0.99;
  return report;
}

McResult mc_solution(const Process& process, const SpaceTimeField& f, double t,
                     std::span<const std::vector<double>> points, long n_paths,
                     std::uint64_t seed) {
  require_samplable(process);
  if (process.dim != f.grid.dim)
    throw ConfigurationError("process and source dimensions differ");
  if (n_paths < 1) throw ConfigurationError("need at least one path");
  if (points.empty()) throw ConfigurationError("need at least one evaluation point");
  const double dt = f.dt();
  const long kt = std::lround(t / dt);
  if (kt < 0 || kt > f.steps || std::abs(t - static_cast<double>(kt) * dt) > 1e-9 * std::max(1.0, t))
    throw ConfigurationError("evaluation time must lie on the source mesh");
  for (const auto& pt : points) {
    if (static_cast<int>(pt.size()) != f.grid.dim)
      throw ConfigurationError("evaluation point dimension does not match the grid");
    for (double c : pt)
      if (!(std::abs(c) <= f.grid.half_extent))
        throw ExtrapolationError("evaluation point lies outside the grid box");
  }

  const std::size_t nq = points.size();
  McResult result;
  result.n_paths = n_paths;
  result.values.assign(nq, 0.0);
  result.std_errors.assign(nq, 0.0);
  if (kt == 0) return result;  // empty time integral

  // Per-path values, filled in parallel, reduced pairwise afterwards.
  std::vector<double> per_path(static_cast<std::size_t>(n_paths) * nq);
  const int d = f.grid.dim;
  parallel_for(n_paths, [&](long p) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(p)));
    // Forward increments over [t_j, t_{j+1}], then suffix sums X_t - X_{t_j}.
    std::vector<double> deltas(static_cast<std::size_t>(kt) * static_cast<std::size_t>(d));
    for (long j = 0; j < kt; ++j) {
      const std::vector<double> inc = sample_increment(
          process, static_cast<double>(j) * dt, static_cast<double>(j + 1) * dt, rng);
      std::copy(inc.begin(), inc.end(), deltas.begin() + static_cast<std::ptrdiff_t>(j) * d);
    }
    std::vector<double> suffix(static_cast<std::size_t>(kt + 1) * static_cast<std::size_t>(d), 0.0);
    for (long j = kt - 1; j >= 0; --j)
      for (int i = 0; i < d; ++i)
        suffix[static_cast<std::size_t>(j) * d + static_cast<std::size_t>(i)] =
            suffix[static_cast<std::size_t>(j + 1) * d + static_cast<std::size_t>(i)] +
            deltas[static_cast<std::size_t>(j) * d + static_cast<std::size_t>(i)];

    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < nq; ++q) {
      double acc = 0.0;
      for (long j = 0; j <= kt; ++j) {
        const double w = (j == 0 || j == kt) ? 0.5 : 1.0;
        for (int i = 0; i < d; ++i)
          y[static_cast<std::size_t>(i)] =
              points[q][static_cast<std::size_t>(i)] +
              suffix[static_cast<std::size_t>(j) * d + static_cast<std::size_t>(i)];
        acc += w * interpolate_level(f, static_cast<int>(j), std::span<const double>(y.data(), static_cast<std::size_t>(d)));
      }
      per_path[static_cast<std::size_t>(p) * nq + q] = acc * dt;
    }
  });

  std::vector<double> column(static_cast<std::size_t>(n_paths));
  for (std::size_t q = 0; q < nq; ++q) {
    for (long p = 0; p < n_paths; ++p)
      column[static_cast<std::size_t>(p)] = per_path[static_cast<std::size_t>(p) * nq + q];
    const double mean = pairwise_sum(column) / static_cast<double>(n_paths);
    result.values[q] = mean;
    if (n_paths > 1) {
      std::vector<double> sq(static_cast<std::size_t>(n_paths));
      for (long p = 0; p < n_paths; ++p) {
        const double dm = column[static_cast<std::size_t>(p)] - mean;
        sq[static_cast<std::size_t>(p)] = dm * dm;
      }
      result.std_errors[q] = std::sqrt(pairwise_sum(sq) /
                                       (static_cast<double>(n_paths) *
                                        static_cast<double>(n_paths - 1)));
    }
  }
  return result;
}

}  // namespace jumpdiff
