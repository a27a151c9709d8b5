#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csimit/ldag.hpp"

namespace csimit {

/// Reflexive ancestors / descendants along directed edges.
std::set<std::string> ancestors(const Ldag& g, const std::set<std::string>& s);
std::set<std::string> descendants(const Ldag& g,
                                  const std::set<std::string>& s);

/// d-separation of x_set and y_set by z_set, labels ignored. Reachability
/// (Bayes-ball), linear in the number of edges. The three sets must be
/// pairwise disjoint.
bool d_separated(const Ldag& g, const std::set<std::string>& x_set,
                 const std::set<std::string>& y_set,
                 const std::set<std::string>& z_set);

/// Minimal d-separator Z with required ⊆ Z ⊆ allowed, or nullopt when no
/// separator within `allowed` exists. Tests the ancestor-restricted maximal
/// candidate first, then shrinks it with the standard two-pass reachability
/// reduction on the moral graph of the ancestral subgraph. Deterministic:
/// output sorted by declaration order.
std::optional<std::vector<std::string>> find_min_sep(
    const Ldag& g, const std::string& x, const std::string& y,
    const std::set<std::string>& required, const std::set<std::string>& allowed);

}  // namespace csimit
