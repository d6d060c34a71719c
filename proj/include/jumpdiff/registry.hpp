#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpdiff/maximal.hpp"
#include "jumpdiff/stochastic.hpp"
#include "jumpdiff/symbols.hpp"

namespace jumpdiff {

// Named instances used by the CLI and the acceptance suite, so experiments
// reference a stable id instead of re-declaring parameters.
struct RegistryEntry {
  std::string id;
  std::string description;
  SymbolPtr symbol;                // always set
  std::optional<Process> process;  // set when the instance is simulatable
};

const std::vector<std::string>& registry_ids();
RegistryEntry registry_entry(const std::string& id);
SymbolPtr registry_symbol(const std::string& id);
Process registry_process(const std::string& id);

// Scale functions for the maximal machinery ("r", "r0.5", "r1.5", "r2", or
// any Bernstein id below).
const std::vector<std::string>& registry_phi_ids();
PhiFn registry_phi(const std::string& id);

// Bernstein functions by id ("linear", "stable05", "stable075", ...).
const std::vector<std::string>& registry_bernstein_ids();
Bernstein registry_bernstein(const std::string& id);

}  // namespace jumpdiff
