#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csimit/ldag.hpp"
#include "csimit/table.hpp"

namespace csimit {

/// Acyclic directed mixed graph over the observed variables; bidirected edges
/// stand for latent confounding. Produced by projecting an LDAG's latent
/// vertices away (labels ignored).
struct Admg {
  std::vector<JointTable::Var> vertices;           // declaration order
  std::vector<std::pair<int, int>> directed;       // from -> to
  std::vector<std::pair<int, int>> bidirected;     // unordered, stored a < b

  int index_of(const std::string& name) const;
};

Admg latent_project(const Ldag& g);

/// Runs the standard identification recursion for P(targets | do(x_var)) on
/// the ADMG against the observational joint `obs` (scope must cover the ADMG
/// vertices). Returns a table F over targets ∪ {x_var} with
/// F(t, x) = P(t | do(x)), or nullopt when the effect is not identifiable.
std::optional<JointTable> identify_effect(const Admg& a, const JointTable& obs,
                                          const std::set<std::string>& targets,
                                          const std::string& x_var);

}  // namespace csimit
