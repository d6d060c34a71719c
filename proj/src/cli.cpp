#include "jumpdiff/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jumpdiff/common.hpp"
#include "jumpdiff/io.hpp"
#include "jumpdiff/kernels.hpp"
#include "jumpdiff/maximal.hpp"
#include "jumpdiff/registry.hpp"
#include "jumpdiff/solver.hpp"
#include "jumpdiff/stochastic.hpp"
#include "jumpdiff/symbols.hpp"

namespace jumpdiff {

namespace {

using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigurationError(std::string("cannot parse ") + what + ": '" + cell + "'");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_doubles(text, what)) {
    if (v != std::floor(v)) throw ConfigurationError(std::string(what) + " must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

GridSpec parse_grid(const std::string& text) {
  const std::vector<double> v = parse_doubles(text, "grid (expected d,L,M)");
  if (v.size() != 3) throw ConfigurationError("grid must be d,L,M");
  return GridSpec(static_cast<int>(v[0]), v[1], static_cast<int>(v[2]));
}

// Everything except run_meta.json is byte-stable across reruns; the wall
// clock lives only here.
void write_run_meta(const std::string& out_dir, const std::vector<std::string>& args) {
  ordered_json meta;
  meta["arguments"] = args;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["written_at"] = buf;
  write_json_file(out_dir + "/run_meta.json", meta);
}

std::string ensure_out_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

const Bernstein* require_phi(const Symbol& symbol, const std::string& id) {
  const Bernstein* phi = symbol.reference_phi();
  if (phi == nullptr)
    throw ConfigurationError("symbol '" + id + "' has no reference Bernstein function");
  return phi;
}

// ---- subcommand implementations -------------------------------------------

int cmd_check_symbol(const std::string& id, const std::string& out_dir, std::ostream& out,
                     const std::vector<std::string>& args) {
  const RegistryEntry entry = registry_entry(id);
  const SymbolConditionReport rep = verify_symbol_conditions(*entry.symbol);

  ordered_json summary;
  summary["symbol"] = id;
  summary["pass"] = rep.pass;
  summary["declared_delta1"] = rep.declared_delta1;
  summary["delta1_fit"] = rep.delta1_fit;
  summary["n1_fit"] = rep.n1_fit;
  summary["ellipticity_ok"] = rep.ellipticity_ok;
  summary["growth_ok"] = rep.growth_ok;
  bool pass = rep.pass;
  if (const Bernstein* phi = entry.symbol->reference_phi()) {
    const BernsteinReport bern = verify_bernstein_conditions(*phi);
    ordered_json b;
    b["spec"] = bern.spec;
    b["pass"] = bern.pass;
    b["declared_delta_lo"] = bern.declared_delta_lo;
    b["declared_delta_hi"] = bern.declared_delta_hi;
    b["fitted_delta_lo"] = bern.fitted_delta_lo;
    b["fitted_delta_hi"] = bern.fitted_delta_hi;
    summary["bernstein"] = b;
    pass = pass && bern.pass;
  }
  summary["overall_pass"] = pass;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back(csv_row({r.t, r.mag, r.ellipticity_ratio, r.growth_ratio}));
    write_csv(out_dir + "/symbol_audit.csv", {"t", "magnitude", "ellipticity_ratio", "growth_ratio"},
              rows);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return pass ? kExitPass : kExitVerifyFail;
}

KernelWhich parse_which(const std::string& text) {
  if (text == "p") return KernelWhich::P;
  if (text == "psidp") return KernelWhich::PsiDeltaP;
  if (text == "q1") return KernelWhich::Q1;
  if (text == "q2") return KernelWhich::Q2;
  if (text == "q3") return KernelWhich::Q3;
  throw ConfigurationError("unknown kernel: '" + text + "' (p|psidp|q1|q2|q3)");
}

int cmd_kernel(const std::string& id, double s, double t, const GridSpec& grid,
               const std::string& which_text, int axis, const std::string& out_dir,
               std::ostream& out, const std::vector<std::string>& args) {
  const SymbolPtr symbol = registry_symbol(id);
  const KernelWhich which = parse_which(which_text);
  const Bernstein* phi = symbol->reference_phi();
  if (which != KernelWhich::P && phi == nullptr)
    throw ConfigurationError("symbol '" + id + "' has no reference Bernstein function");
  KernelSnapshot snap = compute_kernel(*symbol, phi, s, t, grid, which, axis);
  snap.symbol = id;

  ordered_json summary;
  summary["symbol"] = id;
  summary["which"] = kernel_which_name(which);
  summary["s"] = s;
  summary["t"] = t;
  summary["scaling"] = snap.scaling;
  summary["mass"] = snap.mass();
  summary["max_abs"] = snap.max_abs();
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    write_kernel_snapshot(out_dir + "/kernel", snap);
    write_kernel_csv(out_dir + "/kernel.csv", snap);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return kExitPass;
}

int cmd_solve(const std::string& id, const std::string& source, const std::string& out_dir,
              std::ostream& out, const std::vector<std::string>& args) {
  const SymbolPtr symbol = registry_symbol(id);
  const SpaceTimeField f = read_field(source);
  const SpaceTimeField u = solve(*symbol, f);

  ordered_json summary;
  summary["symbol"] = id;
  summary["source"] = source;
  summary["steps"] = u.steps;
  summary["t_final"] = u.t_final;
  summary["u_l2"] = lp_space_time_norm(u, 2.0);
  summary["f_l2"] = lp_space_time_norm(f, 2.0);
  if (const Bernstein* phi = symbol->reference_phi())
    summary["phi_u_l2"] = phi_potential_norm(u, *phi, 2.0).phi_u_norm;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    ordered_json extra;
    extra["symbol"] = id;
    extra["role"] = "solution";
    write_field(out_dir + "/solution", u, extra);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return kExitPass;
}

int cmd_estimate(const std::string& id, const std::string& p_text, const std::string& ladder_text,
                 std::uint64_t seed, int sources, const std::string& out_dir, std::ostream& out,
                 const std::vector<std::string>& args) {
  const SymbolPtr symbol = registry_symbol(id);
  const Bernstein* phi = require_phi(*symbol, id);
  const std::vector<double> p_list = parse_doubles(p_text, "p list");
  const std::vector<int> ladder = parse_ints(ladder_text, "resolution ladder");
  EstimateOptions opts;
  opts.seed = seed;
  opts.n_sources = sources;
  const EstimateTable table = estimate_ratio_harness(*symbol, *phi, p_list, ladder, opts);

  ordered_json summary;
  summary["symbol"] = id;
  summary["seed"] = seed;
  ordered_json per_pm = ordered_json::array();
  double overall_max = 0.0;
  for (const auto& row : table.summary) {
    ordered_json item;
    item["p"] = row.p;
    item["m"] = row.m;
    item["max_ratio"] = row.max_ratio;
    per_pm.push_back(item);
    overall_max = std::max(overall_max, row.max_ratio);
  }
  summary["per_resolution"] = per_pm;
  summary["max_ratio"] = overall_max;
  // Largest spread of the max ratio across the ladder for any p.
  double stability = 0.0;
  for (double p : p_list) {
    double lo = 0.0, hi = 0.0;
    for (const auto& row : table.summary)
      if (row.p == p) {
        if (lo == 0.0 || row.max_ratio < lo) lo = row.max_ratio;
        hi = std::max(hi, row.max_ratio);
      }
    if (lo > 0.0) stability = std::max(stability, hi / lo);
  }
  summary["ladder_spread"] = stability;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : table.rows)
      rows.push_back(csv_row({static_cast<double>(r.source), r.p, static_cast<double>(r.m),
                              r.f_norm, r.u_norm, r.phi_u_norm, r.ratio}));
    write_csv(out_dir + "/estimate.csv",
              {"source", "p", "m", "f_norm", "u_norm", "phi_u_norm", "ratio"}, rows);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return kExitPass;
}

// Smooth bump source shared by mc-compare: space-only profile, constant in
// time, supported well inside the box.
SpaceTimeField bump_source(const GridSpec& grid, int steps, double t_final) {
  SpaceTimeField f(grid, steps, t_final);
  const double radius = 0.45 * grid.half_extent;
  std::vector<double> profile(static_cast<std::size_t>(grid.total_points()));
  std::array<double, 3> x{};
  for (long flat = 0; flat < grid.total_points(); ++flat) {
    grid.coordinate_at(flat, x);
    double r2 = 0.0;
    for (int i = 0; i < grid.dim; ++i) r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    const double y2 = r2 / (radius * radius);
    profile[static_cast<std::size_t>(flat)] = y2 < 1.0 ? std::exp(-1.0 / (1.0 - y2)) : 0.0;
  }
  for (int k = 0; k <= steps; ++k) {
    auto level = f.level(k);
    for (long flat = 0; flat < grid.total_points(); ++flat)
      level[static_cast<std::size_t>(flat)] = profile[static_cast<std::size_t>(flat)];
  }
  return f;
}

int cmd_mc_compare(const std::string& process_id, const std::string& symbol_id, double t_final,
                   long paths, std::uint64_t seed, const std::string& points_file,
                   const std::string& grid_text, int steps, const std::string& out_dir,
                   std::ostream& out, const std::vector<std::string>& args) {
  const Process process = registry_process(process_id);
  const SymbolPtr symbol = registry_symbol(symbol_id);
  const GridSpec grid = grid_text.empty() ? GridSpec(process.dim, kPi, 64) : parse_grid(grid_text);

  const SpaceTimeField f = bump_source(grid, steps, t_final);
  const SpaceTimeField u = solve(*symbol, f);

  std::vector<std::vector<double>> points;
  for (auto& row : read_csv_numeric(points_file)) {
    if (static_cast<int>(row.size()) != grid.dim)
      throw ConfigurationError("points file rows must have one column per dimension");
    points.push_back(std::move(row));
  }
  if (points.empty()) throw ConfigurationError("points file has no numeric rows");

  const McResult mc = mc_solution(process, f, t_final, points, paths, seed);

  bool all_ok = true;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t q = 0; q < points.size(); ++q) {
    const double spectral = interpolate_level(u, u.steps, points[q]);
    const double diff = std::abs(mc.values[q] - spectral);
    const double tol = 3.0 * mc.std_errors[q] + 1e-3;
    const bool ok = diff <= tol;
    all_ok = all_ok && ok;
    std::vector<double> cells = points[q];
    cells.insert(cells.end(), {mc.values[q], mc.std_errors[q], spectral, diff, tol,
                               static_cast<double>(ok)});
    rows.push_back(csv_row(cells));
  }

  ordered_json summary;
  summary["process"] = process_id;
  summary["symbol"] = symbol_id;
  summary["paths"] = paths;
  summary["seed"] = seed;
  summary["points"] = points.size();
  summary["pass"] = all_ok;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    std::vector<std::string> header;
    for (int i = 0; i < grid.dim; ++i) header.push_back("x" + std::to_string(i + 1));
    for (const char* name : {"mc_value", "std_error", "spectral_value", "abs_diff", "tolerance", "ok"})
      header.push_back(name);
    write_csv(out_dir + "/mc_compare.csv", header, rows);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return all_ok ? kExitPass : kExitVerifyFail;
}

std::vector<std::vector<double>> default_frequencies(int dim) {
  std::vector<std::vector<double>> xis;
  for (double mag : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    for (int axis = 0; axis < dim; ++axis) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> xi(static_cast<std::size_t>(dim), 0.0);
        xi[static_cast<std::size_t>(axis)] = sign * mag;
        xis.push_back(xi);
      }
    }
    if (dim > 1) {
      std::vector<double> diag(static_cast<std::size_t>(dim), mag / std::sqrt(static_cast<double>(dim)));
      xis.push_back(diag);
    }
  }
  return xis;
}

int cmd_verify_cf(const std::string& process_id, const std::string& symbol_id,
                  const std::string& pairs_file, long n, std::uint64_t seed,
                  const std::string& xi_file, const std::string& out_dir, std::ostream& out,
                  const std::vector<std::string>& args) {
  const Process process = registry_process(process_id);
  const SymbolPtr symbol = registry_symbol(symbol_id);

  std::vector<std::pair<double, double>> pairs;
  for (const auto& row : read_csv_numeric(pairs_file)) {
    if (row.size() != 2) throw ConfigurationError("pairs file rows must be s,t");
    pairs.emplace_back(row[0], row[1]);
  }
  if (pairs.empty()) throw ConfigurationError("pairs file has no numeric rows");

  std::vector<std::vector<double>> xis;
  if (xi_file.empty()) {
    xis = default_frequencies(process.dim);
  } else {
    for (auto& row : read_csv_numeric(xi_file)) xis.push_back(std::move(row));
    if (xis.empty()) throw ConfigurationError("frequency file has no numeric rows");
  }

  const CfReport report = verify_cf(process, *symbol, pairs, xis, n, seed);

  ordered_json summary;
  summary["process"] = process_id;
  summary["symbol"] = symbol_id;
  summary["n"] = report.n_samples;
  summary["points"] = report.rows.size();
  summary["within_fraction"] = report.within_fraction;
  summary["max_normalized_deviation"] = report.max_dev;
  summary["pass"] = report.pass;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    std::vector<std::string> header{"s", "t"};
    for (int i = 0; i < process.dim; ++i) header.push_back("xi" + std::to_string(i + 1));
    for (const char* name :
         {"empirical_re", "empirical_im", "std_error", "oracle_re", "oracle_im",
          "normalized_deviation"})
      header.push_back(name);
    std::vector<std::vector<std::string>> rows;
    const double se = 1.0 / std::sqrt(static_cast<double>(report.n_samples));
    for (const auto& r : report.rows) {
      std::vector<double> cells{r.s, r.t};
      cells.insert(cells.end(), r.xi.begin(), r.xi.end());
      cells.insert(cells.end(), {r.empirical.real(), r.empirical.imag(), se, r.oracle.real(),
                                 r.oracle.imag(), r.normalized_dev});
      rows.push_back(csv_row(cells));
    }
    write_csv(out_dir + "/verify_cf.csv", header, rows);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return report.pass ? kExitPass : kExitVerifyFail;
}

int cmd_maximal(const std::string& phi_id, const std::string& levels_text,
                const std::string& p_text, const std::string& fields_text, const std::string& u_text,
                int dim, const std::string& out_dir, std::ostream& out,
                const std::vector<std::string>& args) {
  const PhiFn phi = registry_phi(phi_id);
  const std::vector<int> levels = parse_ints(levels_text, "levels");
  if (levels.size() != 2) throw ConfigurationError("levels must be nmin,nmax");
  const std::vector<double> p_list = parse_doubles(p_text, "p list");
  bool half_space = false;
  if (u_text == "half")
    half_space = true;
  else if (u_text != "full")
    throw ConfigurationError("--U must be full or half");

  FsHlOptions fs_opts;
  fs_opts.p_list = p_list;
  const std::vector<std::string> parts = split(fields_text, ':');
  if (parts.size() != 3 || parts[0] != "random")
    throw ConfigurationError("--fields must look like random:<count>:<seed>");
  fs_opts.n_fields = static_cast<int>(std::stol(parts[1]));
  fs_opts.seed = static_cast<std::uint64_t>(std::stoull(parts[2]));

  const PhiAssumptionsReport assumptions = check_phi_assumptions(phi);
  ordered_json summary;
  summary["phi"] = phi_id;
  summary["c_tilde"] = assumptions.c_tilde;
  summary["lambda0"] = assumptions.lambda0;
  summary["assumptions_pass"] = assumptions.pass;
  if (!assumptions.pass) {
    summary["pass"] = false;
    out << summary.dump(2) << "\n";
    if (!out_dir.empty()) {
      ensure_out_dir(out_dir);
      write_json_file(out_dir + "/summary.json", summary);
      write_run_meta(out_dir, args);
    }
    return kExitVerifyFail;
  }

  const PartitionFiltration filt = build_filtration(phi, levels[0], levels[1], dim, half_space);

  // The field raster has one sample per finest cell over one coarsest cell;
  // wide level spans make it explode, so refuse early with a hint.
  const double raster =
      std::pow(2.0, levels[1] - levels[0] + 1) * (filt.coarsest().time_len / filt.finest().time_len);
  if (raster > 5e6)
    throw ConfigurationError("level span too wide for field experiments; narrow --levels");

  const NestingReport nesting = verify_partition_nesting(filt);
  const FsHlReport fshl = verify_fs_hl(filt, fs_opts);

  ordered_json sigma = ordered_json::array();
  for (const auto& lev : filt.levels) {
    ordered_json item;
    item["n"] = lev.n;
    item["sigma"] = lev.sigma;
    item["time_len"] = lev.time_len;
    item["space_side"] = lev.space_side;
    sigma.push_back(item);
  }
  summary["sigma_table"] = sigma;
  summary["n0"] = filt.n0;
  summary["n0_bound"] = filt.n0_bound;
  summary["nesting_pass"] = nesting.pass;
  summary["fs_violations"] = fshl.fs_violations;
  summary["max_hl_ratio"] = fshl.max_hl_ratio;
  summary["refined_max_hl_ratio"] = fshl.refined_max_hl_ratio;
  summary["hl_stable"] = fshl.hl_stable;
  const bool pass = nesting.pass && fshl.pass;
  summary["pass"] = pass;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : fshl.rows)
      rows.push_back(csv_row({static_cast<double>(r.field_index), r.p, r.f_norm, r.sharp_norm,
                              r.fs_constant, r.fs_ratio, static_cast<double>(r.fs_ok),
                              r.hl_ratio}));
    write_csv(out_dir + "/fs_hl.csv",
              {"field", "p", "f_norm", "sharp_norm", "fs_constant", "fs_ratio", "fs_ok", "hl_ratio"},
              rows);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return pass ? kExitPass : kExitVerifyFail;
}

int cmd_hormander(const std::string& id, double t, const std::string& x_text, double s,
                  const std::string& y_text, double c0, const std::string& out_dir,
                  std::ostream& out, const std::vector<std::string>& args) {
  const SymbolPtr symbol = registry_symbol(id);
  const Bernstein* phi = require_phi(*symbol, id);
  const std::vector<double> x = parse_doubles(x_text, "x");
  const std::vector<double> y = parse_doubles(y_text, "y");
  HormanderOptions opts;
  opts.c0 = c0;
  // Refinement-on-demand: the kernel layer reports exactly what is missing
  // (points per axis resp. box size), so retry with the hint applied.
  HormanderResult res;
  for (int attempt = 0;; ++attempt) {
    try {
      res = hormander_integral(*symbol, *phi, t, x, s, y, opts);
      break;
    } catch (const ResolutionError& e) {
      if (attempt >= 4) throw;
      const int m = std::max(e.required_points_per_axis, 2 * opts.direct_grid.points_per_axis);
      opts.direct_grid = GridSpec(opts.direct_grid.dim, opts.direct_grid.half_extent, m);
      opts.scaled_grid = GridSpec(opts.scaled_grid.dim, opts.scaled_grid.half_extent,
                                  std::max(m, 2 * opts.scaled_grid.points_per_axis));
    } catch (const TruncationError& e) {
      if (attempt >= 4) throw;
      int growth = 2;
      while (opts.direct_grid.half_extent * growth < e.suggested_truncation) growth *= 2;
      opts.direct_grid = GridSpec(opts.direct_grid.dim, opts.direct_grid.half_extent * growth,
                                  opts.direct_grid.points_per_axis * growth);
      opts.scaled_grid = GridSpec(opts.scaled_grid.dim, opts.scaled_grid.half_extent * 2.0,
                                  opts.scaled_grid.points_per_axis * 2);
    }
  }

  ordered_json summary;
  summary["symbol"] = id;
  summary["value"] = res.value;
  summary["c0"] = res.c0;
  summary["c_tilde0"] = res.c_tilde0;
  summary["tail_fraction"] = res.tail_fraction;
  summary["direct_points"] = opts.direct_grid.points_per_axis;
  summary["scaled_points"] = opts.scaled_grid.points_per_axis;
  out << summary.dump(2) << "\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    write_json_file(out_dir + "/summary.json", summary);
    write_run_meta(out_dir, args);
  }
  return kExitPass;
}

// Translate {"kind": "...", "...": ...} into the equivalent argv and recurse.
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const ordered_json config = read_json_file(config_path);
  if (!config.is_object() || !config.contains("kind"))
    throw ConfigurationError("config must be an object with a 'kind' field");
  std::vector<std::string> argv{config["kind"].get<std::string>()};
  for (const auto& [key, value] : config.items()) {
    if (key == "kind") continue;
    argv.push_back("--" + key);
    if (value.is_string())
      argv.push_back(value.get<std::string>());
    else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ",";
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      argv.push_back(joined);
    } else
      argv.push_back(value.dump());
  }
  return run_command(argv, out, err);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"desk-scale experiments for nonlocal diffusion driven by "
               "time-inhomogeneous jump processes"};
  app.require_subcommand(0, 1);

  // check-symbol
  auto* sc_check = app.add_subcommand("check-symbol", "audit a registry symbol's conditions");
  std::string check_id, check_out;
  sc_check->add_option("--symbol", check_id, "registry id")->required();
  sc_check->add_option("--out", check_out, "output directory");

  // kernel
  auto* sc_kernel = app.add_subcommand("kernel", "compute a transition or scaled kernel");
  std::string kernel_id, kernel_grid, kernel_which = "p", kernel_out;
  double kernel_s = 0.0, kernel_t = 1.0;
  int kernel_axis = 0;
  sc_kernel->add_option("--symbol", kernel_id, "registry id")->required();
  sc_kernel->add_option("--s", kernel_s, "start time")->required();
  sc_kernel->add_option("--t", kernel_t, "end time")->required();
  sc_kernel->add_option("--grid", kernel_grid, "d,L,M")->required();
  sc_kernel->add_option("--which", kernel_which, "p|psidp|q1|q2|q3");
  sc_kernel->add_option("--axis", kernel_axis, "gradient axis for q2");
  sc_kernel->add_option("--out", kernel_out, "output directory");

  // solve
  auto* sc_solve = app.add_subcommand("solve", "run the spectral Duhamel solver");
  std::string solve_id, solve_source, solve_out;
  sc_solve->add_option("--symbol", solve_id, "registry id")->required();
  sc_solve->add_option("--source", solve_source, "source field base path (.f64/.json)")->required();
  sc_solve->add_option("--out", solve_out, "output directory");

  // estimate
  auto* sc_estimate = app.add_subcommand("estimate", "a-priori estimate ratio harness");
  std::string est_id, est_p = "2", est_ladder = "64,128,256", est_out;
  std::uint64_t est_seed = 0;
  int est_sources = 4;
  sc_estimate->add_option("--symbol", est_id, "registry id")->required();
  sc_estimate->add_option("--p", est_p, "comma-separated exponents");
  sc_estimate->add_option("--ladder", est_ladder, "comma-separated resolutions");
  sc_estimate->add_option("--seed", est_seed, "source seed")->required();
  sc_estimate->add_option("--sources", est_sources, "random sources per cell");
  sc_estimate->add_option("--out", est_out, "output directory");

  // mc-compare
  auto* sc_mc = app.add_subcommand("mc-compare", "Monte Carlo vs spectral solution");
  std::string mc_process, mc_symbol, mc_points, mc_grid, mc_out;
  double mc_t = 1.0;
  long mc_paths = 10000;
  std::uint64_t mc_seed = 0;
  int mc_steps = 64;
  sc_mc->add_option("--process", mc_process, "registry id")->required();
  sc_mc->add_option("--symbol", mc_symbol, "registry id")->required();
  sc_mc->add_option("--T", mc_t, "final time")->required();
  sc_mc->add_option("--paths", mc_paths, "path count")->required();
  sc_mc->add_option("--seed", mc_seed, "master seed")->required();
  sc_mc->add_option("--points", mc_points, "CSV of evaluation points")->required();
  sc_mc->add_option("--grid", mc_grid, "d,L,M (default dim,pi,64)");
  sc_mc->add_option("--steps", mc_steps, "time steps");
  sc_mc->add_option("--out", mc_out, "output directory");

  // verify-cf
  auto* sc_cf = app.add_subcommand("verify-cf", "empirical characteristic function check");
  std::string cf_process, cf_symbol, cf_pairs, cf_xi, cf_out;
  long cf_n = 100000;
  std::uint64_t cf_seed = 0;
  sc_cf->add_option("--process", cf_process, "registry id")->required();
  sc_cf->add_option("--symbol", cf_symbol, "registry id")->required();
  sc_cf->add_option("--pairs", cf_pairs, "CSV of s,t rows")->required();
  sc_cf->add_option("--n", cf_n, "samples per pair")->required();
  sc_cf->add_option("--seed", cf_seed, "master seed")->required();
  sc_cf->add_option("--xi", cf_xi, "CSV of frequencies (default built-in set)");
  sc_cf->add_option("--out", cf_out, "output directory");

  // maximal
  auto* sc_max = app.add_subcommand("maximal", "filtration, sharp/maximal operators, FS + HL");
  std::string max_phi, max_levels = "-2,4", max_p = "2,4", max_fields = "random:100:1", max_u = "full",
              max_out;
  int max_dim = 1;
  sc_max->add_option("--phi", max_phi, "scale function id")->required();
  sc_max->add_option("--levels", max_levels, "nmin,nmax");
  sc_max->add_option("--p", max_p, "comma-separated exponents");
  sc_max->add_option("--fields", max_fields, "random:<count>:<seed>");
  sc_max->add_option("--U", max_u, "full|half");
  sc_max->add_option("--dim", max_dim, "spatial dimension");
  sc_max->add_option("--out", max_out, "output directory");

  // hormander
  auto* sc_hor = app.add_subcommand("hormander", "phi-type Hormander integral");
  std::string hor_id, hor_x, hor_y, hor_out;
  double hor_t = 1.0, hor_s = 0.5, hor_c0 = 0.0;
  sc_hor->add_option("--symbol", hor_id, "registry id")->required();
  sc_hor->add_option("--t", hor_t, "kernel K1 time")->required();
  sc_hor->add_option("--x", hor_x, "comma-separated point")->required();
  sc_hor->add_option("--s", hor_s, "kernel K2 time")->required();
  sc_hor->add_option("--y", hor_y, "comma-separated point")->required();
  sc_hor->add_option("--c0", hor_c0, "neighborhood constant (default fitted)");
  sc_hor->add_option("--out", hor_out, "output directory");

  // run
  auto* sc_run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string run_config;
  sc_run->add_option("--config", run_config, "JSON config path")->required();

  std::vector<const char*> argv;
  argv.push_back("jumpdiff");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (sc_check->parsed()) return cmd_check_symbol(check_id, check_out, out, args);
    if (sc_kernel->parsed())
      return cmd_kernel(kernel_id, kernel_s, kernel_t, parse_grid(kernel_grid), kernel_which,
                        kernel_axis, kernel_out, out, args);
    if (sc_solve->parsed()) return cmd_solve(solve_id, solve_source, solve_out, out, args);
    if (sc_estimate->parsed())
      return cmd_estimate(est_id, est_p, est_ladder, est_seed, est_sources, est_out, out, args);
    if (sc_mc->parsed())
      return cmd_mc_compare(mc_process, mc_symbol, mc_t, mc_paths, mc_seed, mc_points, mc_grid,
                            mc_steps, mc_out, out, args);
    if (sc_cf->parsed())
      return cmd_verify_cf(cf_process, cf_symbol, cf_pairs, cf_n, cf_seed, cf_xi, cf_out, out,
                           args);
    if (sc_max->parsed())
      return cmd_maximal(max_phi, max_levels, max_p, max_fields, max_u, max_dim, max_out, out,
                         args);
    if (sc_hor->parsed())
      return cmd_hormander(hor_id, hor_t, hor_x, hor_s, hor_y, hor_c0, hor_out, out, args);
    if (sc_run->parsed()) return cmd_run(run_config, out, err);
    err << app.help() << "\n";
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResolutionError& e) {
    err << "numerical failure: " << e.what() << "\n";
    err << "hint: the grid needs at least " << e.required_points_per_axis
        << " points per axis\n";
    return kExitNumerical;
  } catch (const TruncationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    err << "hint: retry with half extent >= " << format_double(e.suggested_truncation) << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace jumpdiff
