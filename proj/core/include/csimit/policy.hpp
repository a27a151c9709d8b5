#pragma once

#include <string>
#include <vector>

#include "csimit/assignment.hpp"
#include "csimit/table.hpp"

namespace csimit {

class Ldag;

/// Stochastic mapping from assignments of `scope` to distributions over the
/// action domain. Rows are stored row-major over the scope domains (first
/// scope variable slowest), matching JointTable's layout.
struct PolicyTable {
  std::string action;
  std::vector<std::string> action_domain;
  std::vector<JointTable::Var> scope;        // ordered subset of policy scope
  std::vector<std::vector<double>> rows;     // one distribution per scope cell
  bool shape_only = false;                   // true when built without data
  std::vector<std::string> row_notes;        // e.g. "zero-mass context: uniform"

  std::size_t row_count() const;
  std::size_t row_index(const PartialAssignment& scope_assignment) const;
  PartialAssignment row_assignment(std::size_t row) const;
  const std::vector<double>& row_for(const PartialAssignment& full) const;
  double prob(const std::string& action_value,
              const PartialAssignment& scope_assignment) const;

  /// Uniform policy over an explicit scope.
  static PolicyTable uniform(const Ldag& g,
                             const std::vector<std::string>& scope_vars);

  /// Rows must sum to one (within tol) and be nonnegative.
  void validate(double tol = 1e-9) const;
};

std::string serialize_policy_json(const PolicyTable& p);

}  // namespace csimit
