#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csimit/assignment.hpp"
#include "csimit/ldag.hpp"
#include "csimit/policy.hpp"
#include "csimit/table.hpp"

namespace csimit {

enum class Decision { Imitable, NotImitable, Unknown };

const char* decision_name(Decision d);
int decision_exit_code(Decision d);  // 0 / 2 / 3

struct ContextResult {
  PartialAssignment context;
  // Separator when the context admits imitation, nullopt otherwise.
  std::optional<std::vector<std::string>> separator;
};

struct ImitabilityVerdict {
  Decision decision = Decision::Unknown;
  std::optional<PolicyTable> policy;
  std::optional<PartialAssignment> witness;  // failing context
  std::vector<ContextResult> per_context;
  std::vector<std::string> notes;
};

/// Possible policy-scope backdoor set: Z = An({X,Y} ∪ required) ∩ Pa^Π,
/// returned iff it d-separates X from Y with X's outgoing edges removed.
/// This single test is complete for the existence of such a set.
std::optional<std::vector<std::string>> find_sep(
    const Ldag& g, const std::set<std::string>& required = {});

struct DecisionOptions {
  std::uint64_t context_cap = 1ull << 20;
  unsigned threads = 1;
};

/// One classic (label-free) imitability decision. Labeled input is an error;
/// use imitate1 for that.
ImitabilityVerdict classic_imitable(const Ldag& g,
                                    const std::optional<JointTable>& obs = {});

/// For every full context over the context variables: build the
/// context-induced subgraph and run find_sep on it. All-success is necessary
/// for imitability; it is also sufficient when Pa(C(L)) ⊆ C(L).
std::vector<ContextResult> corollary1_check(const Ldag& g,
                                            const DecisionOptions& opt = {});

/// Graphical imitability decision and (when possible) the mixture policy
/// assembled from the per-context conditionals P(x | z_c, c).
ImitabilityVerdict imitate1(const Ldag& g,
                            const std::optional<JointTable>& obs = {},
                            const DecisionOptions& opt = {});

std::string serialize_verdict_json(const ImitabilityVerdict& v);

}  // namespace csimit
