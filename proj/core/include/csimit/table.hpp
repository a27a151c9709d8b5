#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csimit/assignment.hpp"

namespace csimit {

/// Dense probability table over the joint domain of an ordered variable list.
/// Cells are stored row-major with the first scope variable slowest. Sums use
/// compensated (Kahan) accumulation so desk-scale exactness targets hold.
class JointTable {
 public:
  struct Var {
    std::string name;
    std::vector<std::string> domain;
  };

  JointTable() = default;
  static JointTable zeros(std::vector<Var> scope);

  const std::vector<Var>& scope() const { return scope_; }
  std::size_t size() const { return probs_.size(); }
  double& operator[](std::size_t i) { return probs_[i]; }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  int var_position(const std::string& name) const;  // -1 when absent
  int value_index(const std::string& var, const std::string& value) const;

  std::size_t flat_index(const std::vector<int>& digits) const;
  std::vector<int> digits(std::size_t flat) const;
  int digit(std::size_t flat, int var_pos) const;

  /// Full-scope assignment of a cell.
  PartialAssignment assignment_at(std::size_t flat) const;
  /// Does a cell agree with a partial assignment (over scope variables)?
  bool consistent(std::size_t flat, const PartialAssignment& a) const;

  double total() const;
  double mass(const PartialAssignment& a) const;

  /// Sum out everything outside `vars` (result keeps scope order).
  JointTable marginal(const std::vector<std::string>& vars) const;

  /// P(rest | on): drops the conditioned variables from the scope and
  /// renormalizes. Throws ZeroMassContext when P(on) == 0.
  JointTable condition(const PartialAssignment& on) const;

  /// Convenience: the distribution of one variable given a partial assignment.
  std::vector<double> distribution_of(const std::string& var,
                                      const PartialAssignment& given) const;

  void normalize();

  /// Metadata: set when the table is an empirical estimate from n samples.
  std::optional<std::uint64_t> estimated_from() const { return estimated_n_; }
  void set_estimated_from(std::uint64_t n) { estimated_n_ = n; }

 private:
  std::vector<Var> scope_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
  std::optional<std::uint64_t> estimated_n_;
};

/// sum_i p_i log(p_i / q_i), natural log. Throws AbsoluteContinuityError when
/// q vanishes on the support of p.
double kl_divergence(const JointTable& p, const JointTable& q);

/// Expectation of a single-variable table under a symbol -> real map.
double expected_value(const JointTable& t,
                      const std::map<std::string, double>& numeric);

}  // namespace csimit
