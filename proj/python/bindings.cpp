#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jumpdiff/cli.hpp"
#include "jumpdiff/io.hpp"
#include "jumpdiff/kernels.hpp"
#include "jumpdiff/maximal.hpp"
#include "jumpdiff/registry.hpp"
#include "jumpdiff/solver.hpp"
#include "jumpdiff/stochastic.hpp"
#include "jumpdiff/symbols.hpp"

namespace py = pybind11;
using namespace jumpdiff;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

SpaceTimeField field_from_array(const ComplexArray& arr, double half_extent, double t_final) {
  const py::buffer_info info = arr.request();
  if (info.ndim < 2 || info.ndim > 4)
    throw std::invalid_argument("field array must have shape (K+1, M[, M[, M]])");
  const int dim = static_cast<int>(info.ndim) - 1;
  const int m = static_cast<int>(info.shape[1]);
  for (int i = 2; i <= dim; ++i)
    if (info.shape[i] != m) throw std::invalid_argument("spatial axes must have equal length");
  const int steps = static_cast<int>(info.shape[0]) - 1;
  SpaceTimeField field(GridSpec(dim, half_extent, m), steps, t_final);
  const auto* src = static_cast<const std::complex<double>*>(info.ptr);
  std::copy(src, src + field.values.size(), field.values.begin());
  return field;
}

ComplexArray field_to_array(const SpaceTimeField& field) {
  std::vector<py::ssize_t> shape{field.steps + 1};
  for (int i = 0; i < field.grid.dim; ++i) shape.push_back(field.grid.points_per_axis);
  ComplexArray arr(shape);
  std::copy(field.values.begin(), field.values.end(),
            static_cast<std::complex<double>*>(arr.request().ptr));
  return arr;
}

KernelWhich which_from_name(const std::string& name) {
  for (KernelWhich w : {KernelWhich::P, KernelWhich::PsiDeltaP, KernelWhich::Q1, KernelWhich::Q2,
                        KernelWhich::Q3})
    if (kernel_which_name(w) == name) return w;
  throw std::invalid_argument("unknown kernel name: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "numerics for Cauchy problems driven by time-inhomogeneous jump processes";

  m.def("registry_ids", [] { return registry_ids(); });
  m.def("phi_ids", [] { return registry_phi_ids(); });
  m.def("bernstein_ids", [] { return registry_bernstein_ids(); });

  m.def(
      "symbol_value",
      [](const std::string& id, double t, const std::vector<double>& xi) {
        return registry_symbol(id)->psi(t, xi);
      },
      py::arg("symbol"), py::arg("t"), py::arg("xi"));

  m.def(
      "bernstein_value",
      [](const std::string& id, double lam) { return registry_bernstein(id)(lam); },
      py::arg("bernstein"), py::arg("lam"));

  m.def(
      "scaling_factor",
      [](const std::string& id, double tau) { return scaling_factor(registry_bernstein(id), tau); },
      py::arg("bernstein"), py::arg("tau"));

  m.def(
      "check_symbol",
      [](const std::string& id) {
        const SymbolConditionReport rep = verify_symbol_conditions(*registry_symbol(id));
        py::dict d;
        d["symbol"] = rep.symbol;
        d["pass"] = rep.pass;
        d["declared_delta1"] = rep.declared_delta1;
        d["delta1_fit"] = rep.delta1_fit;
        d["n1_fit"] = rep.n1_fit;
        d["ellipticity_ok"] = rep.ellipticity_ok;
        d["growth_ok"] = rep.growth_ok;
        return d;
      },
      py::arg("symbol"));

  m.def(
      "solve",
      [](const std::string& id, const ComplexArray& source, double half_extent, double t_final) {
        return field_to_array(solve(*registry_symbol(id), field_from_array(source, half_extent, t_final)));
      },
      py::arg("symbol"), py::arg("source"), py::arg("half_extent"), py::arg("t_final"));

  m.def(
      "kernel",
      [](const std::string& id, const std::string& which, double s, double t, int dim,
         double half_extent, int points, int axis) {
        const SymbolPtr symbol = registry_symbol(id);
        const KernelSnapshot snap = compute_kernel(*symbol, symbol->reference_phi(), s, t,
                                                   GridSpec(dim, half_extent, points),
                                                   which_from_name(which), axis);
        std::vector<py::ssize_t> shape(static_cast<std::size_t>(dim), points);
        ComplexArray values(shape);
        std::copy(snap.values.begin(), snap.values.end(),
                  static_cast<std::complex<double>*>(values.request().ptr));
        py::dict d;
        d["values"] = values;
        d["mass"] = snap.mass();
        d["max_abs"] = snap.max_abs();
        d["scaling"] = snap.scaling;
        return d;
      },
      py::arg("symbol"), py::arg("which"), py::arg("s"), py::arg("t"), py::arg("dim"),
      py::arg("half_extent"), py::arg("points"), py::arg("axis") = 0);

  m.def(
      "verify_cf",
      [](const std::string& process_id, const std::vector<std::pair<double, double>>& pairs,
         const std::vector<std::vector<double>>& xis, long n, std::uint64_t seed) {
        const Process process = registry_process(process_id);
        const CfReport rep = verify_cf(process, *process_symbol(process), pairs, xis, n, seed);
        py::dict d;
        d["pass"] = rep.pass;
        d["within_fraction"] = rep.within_fraction;
        d["max_normalized_deviation"] = rep.max_dev;
        d["n"] = rep.n_samples;
        return d;
      },
      py::arg("process"), py::arg("pairs"), py::arg("xis"), py::arg("n"), py::arg("seed"));

  m.def(
      "mc_solution",
      [](const std::string& process_id, const ComplexArray& source, double half_extent,
         double t_final, double t, const std::vector<std::vector<double>>& points, long n_paths,
         std::uint64_t seed) {
        const McResult res = mc_solution(registry_process(process_id),
                                         field_from_array(source, half_extent, t_final), t, points,
                                         n_paths, seed);
        return py::make_tuple(res.values, res.std_errors);
      },
      py::arg("process"), py::arg("source"), py::arg("half_extent"), py::arg("t_final"),
      py::arg("t"), py::arg("points"), py::arg("n_paths"), py::arg("seed"));

  m.def(
      "build_filtration",
      [](const std::string& phi_id, int n_min, int n_max, int dim) {
        const PartitionFiltration filt = build_filtration(registry_phi(phi_id), n_min, n_max, dim);
        py::list levels;
        for (const auto& lev : filt.levels) {
          py::dict item;
          item["n"] = lev.n;
          item["sigma"] = lev.sigma;
          item["time_len"] = lev.time_len;
          item["space_side"] = lev.space_side;
          levels.append(item);
        }
        py::dict d;
        d["levels"] = levels;
        d["n0"] = filt.n0;
        d["n0_bound"] = filt.n0_bound;
        d["c_tilde"] = filt.c_tilde;
        return d;
      },
      py::arg("phi"), py::arg("n_min"), py::arg("n_max"), py::arg("dim") = 1);

  m.def(
      "verify_fs_hl",
      [](const std::string& phi_id, int n_min, int n_max, int dim, const std::vector<double>& p_list,
         int n_fields, std::uint64_t seed) {
        const PartitionFiltration filt = build_filtration(registry_phi(phi_id), n_min, n_max, dim);
        FsHlOptions opts;
        opts.p_list = p_list;
        opts.n_fields = n_fields;
        opts.seed = seed;
        const FsHlReport rep = verify_fs_hl(filt, opts);
        py::dict d;
        d["pass"] = rep.pass;
        d["fs_violations"] = rep.fs_violations;
        d["max_hl_ratio"] = rep.max_hl_ratio;
        d["hl_stable"] = rep.hl_stable;
        d["n0"] = rep.n0;
        return d;
      },
      py::arg("phi"), py::arg("n_min"), py::arg("n_max"), py::arg("dim"), py::arg("p_list"),
      py::arg("n_fields"), py::arg("seed"));

  m.def(
      "hormander",
      [](const std::string& id, double t, const std::vector<double>& x, double s,
         const std::vector<double>& y) {
        const SymbolPtr symbol = registry_symbol(id);
        const Bernstein* phi = symbol->reference_phi();
        if (phi == nullptr) throw std::invalid_argument("symbol has no reference phi");
        const HormanderResult res = hormander_integral(*symbol, *phi, t, x, s, y);
        py::dict d;
        d["value"] = res.value;
        d["c0"] = res.c0;
        d["c_tilde0"] = res.c_tilde0;
        d["tail_fraction"] = res.tail_fraction;
        return d;
      },
      py::arg("symbol"), py::arg("t"), py::arg("x"), py::arg("s"), py::arg("y"));

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "in-process CLI; returns (exit_code, stdout, stderr)");
}
