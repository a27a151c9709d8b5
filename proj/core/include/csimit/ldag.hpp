#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "csimit/assignment.hpp"

namespace csimit {

enum class Role { Action, Reward, Plain };

struct VariableDecl {
  std::string name;
  std::vector<std::string> domain;  // symbolic values, size >= 2
  bool observed = true;
  Role role = Role::Plain;
};

struct LabeledEdge {
  std::string from;
  std::string to;
  // Each label is a parent assignment under which the edge is absent.
  std::vector<PartialAssignment> labels;
};

/// Labeled DAG: a DAG whose edges may carry label sets encoding local
/// context-specific independences, plus the policy scope (the observed
/// non-descendants of the action a policy may condition on).
///
/// Immutable after construction; all operations below are pure functions, so
/// values can be shared freely across threads.
class Ldag {
 public:
  enum class Validation {
    Structural,  // names/domains/references/acyclicity only
    Full,        // + role counts, label well-formedness, scope constraints
  };

  static Ldag create(std::vector<VariableDecl> variables,
                     std::vector<LabeledEdge> edges,
                     std::vector<std::string> policy_scope,
                     Validation level = Validation::Full);

  std::size_t size() const { return variables_.size(); }
  const std::vector<VariableDecl>& variables() const { return variables_; }
  const VariableDecl& variable(int idx) const { return variables_[idx]; }
  const std::vector<LabeledEdge>& edges() const { return edges_; }
  const std::vector<std::string>& policy_scope() const { return policy_scope_; }

  int index_of(const std::string& name) const;            // throws on unknown
  std::optional<int> find(const std::string& name) const;

  const std::vector<int>& parents(int idx) const { return parents_[idx]; }
  const std::vector<int>& children(int idx) const { return children_[idx]; }
  std::vector<std::string> parent_names(const std::string& name) const;

  int action_index() const { return action_; }
  int reward_index() const { return reward_; }
  const std::string& action_name() const { return variables_[action_].name; }
  const std::string& reward_name() const { return variables_[reward_].name; }

  bool has_edge(const std::string& from, const std::string& to) const;
  const LabeledEdge* edge(const std::string& from, const std::string& to) const;

  /// Declaration-stable topological order (ties broken by declaration index).
  std::vector<int> topological_order() const;

  std::vector<std::string> observed_names() const;

  /// Validates a value against a variable's declared domain.
  void check_value(const std::string& var, const std::string& value) const;

 private:
  Ldag() = default;
  void build_adjacency();

  std::vector<VariableDecl> variables_;
  std::vector<LabeledEdge> edges_;
  std::vector<std::string> policy_scope_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  int action_ = -1;
  int reward_ = -1;
};

/// Variables appearing in at least one binding of at least one edge label,
/// in declaration order.
std::vector<std::string> context_variables(const Ldag& g);

/// Context-induced subgraph for w: incompatible labels dropped, edges whose
/// label is fully implied by w deleted, and every edge incident to vars(w)
/// deleted. Vertices are retained (vars(w) become isolated).
Ldag context_induced_subgraph(const Ldag& g, const PartialAssignment& w);

/// Context-specific DAG for c: only the edges absent given c are deleted and
/// incompatible labels dropped; edges incident to vars(c) are kept.
Ldag context_specific_dag(const Ldag& g, const PartialAssignment& c);

/// Deletes all edges into `remove_into` and out of `remove_outof`; labels on
/// surviving edges are retained.
Ldag mutilate(const Ldag& g, const std::set<std::string>& remove_into,
              const std::set<std::string>& remove_outof);

/// Same graph with every label set emptied (the plain-DAG view).
Ldag strip_labels(const Ldag& g);

/// Supergraph with an edge from every policy-scope variable to the action.
Ldag add_policy_edges(const Ldag& g);

bool label_compatible(const PartialAssignment& label,
                      const PartialAssignment& context);
bool label_implied(const PartialAssignment& label,
                   const PartialAssignment& context);

Ldag parse_ldag_json(const std::string& text);
std::string serialize_ldag_json(const Ldag& g);

}  // namespace csimit
