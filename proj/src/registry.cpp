#include "jumpdiff/registry.hpp"

#include <cmath>

#include "jumpdiff/common.hpp"

namespace jumpdiff {

namespace {

PiecewiseConstant one_two_switch() {
  return PiecewiseConstant({0.0, 0.5}, {1.0, 2.0});
}

RegistryEntry build(const std::string& id) {
  RegistryEntry e;
  e.id = id;
  if (id == "heat") {
    e.description = "Brownian motion; heat equation with psi(|xi|^2) = |xi|^2";
    e.process = make_sbm_process(Bernstein::linear(), PiecewiseConstant::constant(1.0), 1, id);
  } else if (id == "stable-sbm-alpha05") {
    e.description = "stable subordinate Brownian motion, alpha = 0.5; Psi = -|xi|";
    e.process = make_sbm_process(Bernstein::stable(0.5), PiecewiseConstant::constant(1.0), 1, id);
  } else if (id == "stable-sbm-alpha075") {
    e.description = "stable subordinate Brownian motion, alpha = 0.75; Psi = -|xi|^1.5";
    e.process = make_sbm_process(Bernstein::stable(0.75), PiecewiseConstant::constant(1.0), 1, id);
  } else if (id == "ex2.3-sbm-alpha05-sigma12") {
    e.description = "modulated SBM, alpha = 0.5, sigma switching 1 -> 2 at t = 0.5";
    e.process = make_sbm_process(Bernstein::stable(0.5), one_two_switch(), 1, id);
  } else if (id == "ex2.3-sbm-alpha075-sigma12") {
    e.description = "modulated SBM, alpha = 0.75, sigma switching 1 -> 2 at t = 0.5";
    e.process = make_sbm_process(Bernstein::stable(0.75), one_two_switch(), 1, id);
  } else if (id == "ex2.4-clock-a12") {
    e.description = "additive clock over stable SBM, alpha = 0.75, rate switching 1 -> 2";
    e.process = make_clock_process(Bernstein::stable(0.75), one_two_switch(), 1, id);
  } else if (id == "ex2.5-sum-drift") {
    e.description = "stable SBM (alpha = 0.75) plus piecewise drift 0.5";
    e.process = with_drift(
        make_sbm_process(Bernstein::stable(0.75), PiecewiseConstant::constant(1.0), 1, id),
        {PiecewiseConstant::constant(0.5)});
  } else if (id == "ex2.5-sum-cpoisson") {
    e.description = "stable SBM (alpha = 0.75) plus compound Poisson (rate 1, jumps in [-0.5, 0.5])";
    e.process = with_compound_poisson(
        make_sbm_process(Bernstein::stable(0.75), PiecewiseConstant::constant(1.0), 1, id), 1.0,
        0.5);
  } else if (id == "remark-anisotropic") {
    e.description = "anisotropic sum of one-dimensional stable generators (negative control)";
    e.symbol = make_anisotropic_symbol(1.0, PiecewiseConstant::constant(1.0), 2);
    return e;
  } else {
    throw ConfigurationError("unknown registry id: " + id);
  }
  e.symbol = process_symbol(*e.process);
  return e;
}

}  // namespace

const std::vector<std::string>& registry_ids() {
  static const std::vector<std::string> ids{
      "heat",
      "stable-sbm-alpha05",
      "stable-sbm-alpha075",
      "ex2.3-sbm-alpha05-sigma12",
      "ex2.3-sbm-alpha075-sigma12",
      "ex2.4-clock-a12",
      "ex2.5-sum-drift",
      "ex2.5-sum-cpoisson",
      "remark-anisotropic",
  };
  return ids;
}

RegistryEntry registry_entry(const std::string& id) { return build(id); }

SymbolPtr registry_symbol(const std::string& id) { return build(id).symbol; }

Process registry_process(const std::string& id) {
  RegistryEntry e = build(id);
  if (!e.process)
    throw ConfigurationError("registry id has no simulatable process: " + id);
  return *e.process;
}

const std::vector<std::string>& registry_phi_ids() {
  static const std::vector<std::string> ids{"r", "r0.5", "r1.5", "r2",
                                            "linear", "stable05", "stable075"};
  return ids;
}

PhiFn registry_phi(const std::string& id) {
  if (id == "r") return [](double r) { return r; };
  if (id == "r0.5") return [](double r) { return std::sqrt(r); };
  if (id == "r1.5") return [](double r) { return std::pow(r, 1.5); };
  if (id == "r2") return [](double r) { return r * r; };
  return phi_fn(registry_bernstein(id));
}

const std::vector<std::string>& registry_bernstein_ids() {
  static const std::vector<std::string> ids{"linear", "stable05", "stable075",
                                            "relativistic05", "sum-stable-03-07"};
  return ids;
}

Bernstein registry_bernstein(const std::string& id) {
  if (id == "linear") return Bernstein::linear();
  if (id == "stable05") return Bernstein::stable(0.5);
  if (id == "stable075") return Bernstein::stable(0.75);
  if (id == "relativistic05") return Bernstein::relativistic(0.5, 1.0);
  if (id == "sum-stable-03-07") return Bernstein::sum_stable(0.3, 0.7);
  throw ConfigurationError("unknown Bernstein id: " + id);
}

}  // namespace jumpdiff
