#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csimit/assignment.hpp"
#include "csimit/ldag.hpp"
#include "csimit/policy.hpp"
#include "csimit/table.hpp"

namespace csimit {

inline constexpr std::uint64_t kDefaultStateCap = 1ull << 22;

/// Conditional probability table of one variable given its graph parents.
/// Rows are indexed row-major over the parents' domains with the first parent
/// slowest; parents are kept in variable-declaration order.
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;
};

/// Finite discrete SCM compatible with an LDAG: one CPT per variable, parent
/// sets equal to the graph's. Exogenous noise is folded into row
/// stochasticity, so latent endogenous variables with root CPTs subsume
/// explicit exogenous variables.
class DiscreteScm {
 public:
  static DiscreteScm create(Ldag graph, std::vector<Cpt> cpts,
                            std::vector<std::string> notes = {});

  const Ldag& graph() const { return graph_; }
  const Cpt& cpt(int var_index) const { return cpts_[var_index]; }
  const Cpt& cpt(const std::string& name) const {
    return cpts_[graph_.index_of(name)];
  }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  explicit DiscreteScm(Ldag graph) : graph_(std::move(graph)) {}

  Ldag graph_;
  std::vector<Cpt> cpts_;
  std::vector<std::string> notes_;
};

/// Exact joint over all variables by enumeration of the CPT product.
JointTable joint_distribution(const DiscreteScm& m,
                              std::uint64_t cap = kDefaultStateCap);

/// Post-interventional joint under a stochastic policy (the action's CPT is
/// replaced by the policy) or a point intervention do(X=x).
JointTable interventional(const DiscreteScm& m, const PolicyTable& policy,
                          std::uint64_t cap = kDefaultStateCap);
JointTable interventional(const DiscreteScm& m, const PartialAssignment& do_x,
                          std::uint64_t cap = kDefaultStateCap);

struct CsiViolation {
  std::string from;
  std::string to;
  PartialAssignment label;
  std::string row_a;   // canonical keys of the offending parent rows
  std::string row_b;
  double max_gap = 0.0;
};

/// Empty iff every edge label's local independence holds in the CPTs: rows
/// whose parent assignment extends the label are identical across the values
/// of the edge's tail.
std::vector<CsiViolation> validate_csi(const DiscreteScm& m);

struct Dataset {
  std::vector<std::string> columns;                  // declaration order
  std::vector<std::vector<std::string>> domains;     // per column
  std::vector<std::vector<int>> rows;                // value indices

  std::string to_csv() const;
  static Dataset from_csv(const std::string& text);
};

/// Ancestral sampling in topological order; same seed, same dataset.
Dataset sample(const DiscreteScm& m, std::uint64_t n, std::uint64_t seed);

/// Empirical joint over `vars` with additive smoothing alpha (default none).
JointTable estimate_joint(const Dataset& data,
                          const std::vector<std::string>& vars,
                          double alpha = 0.0);

DiscreteScm parse_scm_json(const std::string& text);
std::string serialize_scm_json(const DiscreteScm& m);

}  // namespace csimit
