#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "csimit/assignment.hpp"
#include "csimit/identify.hpp"
#include "csimit/imitability.hpp"
#include "csimit/ldag.hpp"
#include "csimit/policy.hpp"
#include "csimit/table.hpp"

namespace csimit {

/// Identification result for P(s | do(x), c): either the plain identification
/// algorithm on the context graph (Direct) or a context-transport estimand
/// P(s | x, c, c'') witnessed by an extension c'' under which the action has
/// no open backdoor to s and s ignores the extension post-intervention.
struct IdFormula {
  enum class Rule { Direct, ContextTransport };

  Rule rule = Rule::Direct;
  std::set<std::string> surrogate;  // s
  PartialAssignment context;        // c
  PartialAssignment extension;      // c'' (ContextTransport only)

  std::string provenance() const;

  /// Distribution over the surrogate set given do(X = x_value) and the
  /// context; evaluable from the observational joint alone.
  JointTable evaluate(const Ldag& g, const JointTable& obs,
                      const std::string& x_value) const;
};

struct NotIdentifiedDiag {
  std::string reason;
};

using CsiIdentifyResult = std::variant<IdFormula, NotIdentifiedDiag>;

/// Minimal surrogate set for the context: a minimal separator of X and Y in
/// the context-specific DAG plus policy edges, required to contain vars(c),
/// with vars(c) subtracted from the result.
std::optional<std::set<std::string>> context_specific_surrogate(
    const Ldag& g, const PartialAssignment& c);

/// Restricted identification of P(s | do(x), c). Tries the standard
/// identification algorithm on the context graph first, then context
/// transport over extensions of c. `obs` (optional) enables positivity
/// screening of candidate extensions.
CsiIdentifyResult csi_identify(const Ldag& g, const std::set<std::string>& s,
                               const PartialAssignment& c,
                               const JointTable* obs = nullptr);

/// Linear feasibility problem for the policy cells of one context: equality
/// rows match P(S_c | do(pi), c) to P(S_c | c); simplex blocks keep each
/// policy row stochastic.
struct PolicyEquationSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<std::vector<int>> blocks;
  std::vector<JointTable::Var> unknown_scope;  // Pa^Pi minus the context vars
  std::vector<std::string> action_domain;
  PartialAssignment context;
  double tolerance = 1e-8;
  bool vacuous = false;  // zero-mass context: any stochastic table solves
  std::vector<std::string> notes;
};

PolicyEquationSystem build_equation_system(const Ldag& g,
                                           const std::set<std::string>& s,
                                           const PartialAssignment& c,
                                           const IdFormula& formula,
                                           const JointTable& obs);

struct PolicySolve {
  PolicyTable fragment;
  double residual = 0.0;
};

/// Nonnegative least-squares / feasibility solve; minimum-norm among
/// solutions. nullopt when the residual exceeds the system tolerance.
std::optional<PolicySolve> solve_policy_equations(
    const PolicyEquationSystem& sys);

struct BranchInfo {
  PartialAssignment context;
  std::string route;  // "separator" | "surrogate" | "split" | "fail"
  std::vector<std::string> separator;
  std::vector<std::string> surrogate;
  std::string formula;
  double residual = 0.0;
  std::string split_variable;
  std::string detail;
};

struct Imitate2Options {
  double tolerance = -1.0;  // <0: 1e-8 exact, concentration-scaled for samples
  unsigned threads = 1;
  std::uint64_t policy_cell_cap = 1ull << 20;
};

struct Imitate2Result {
  ImitabilityVerdict verdict;
  std::vector<BranchInfo> branches;
  double tolerance_used = 1e-8;
};

/// Data-driven imitation: recursive per-context search combining policy-scope
/// backdoor separators, context-specific surrogates with transported
/// estimands, and context splitting. Sound, not complete: decisions are
/// Imitable or Unknown, never NotImitable.
Imitate2Result imitate2(const Ldag& g, const JointTable& obs,
                        const Imitate2Options& opt = {});

std::string serialize_imitate2_json(const Imitate2Result& r);

}  // namespace csimit
