#include "csimit/policy.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "csimit/errors.hpp"
#include "csimit/ldag.hpp"

namespace csimit {

std::size_t PolicyTable::row_count() const {
  std::size_t n = 1;
  for (const auto& v : scope) n *= v.domain.size();
  return n;
}

std::size_t PolicyTable::row_index(
    const PartialAssignment& scope_assignment) const {
  std::size_t idx = 0;
  for (const auto& v : scope) {
    auto value = scope_assignment.get(v.name);
    if (!value) {
      throw InputError("policy row lookup: missing binding for '" + v.name +
                       "'");
    }
    auto it = std::find(v.domain.begin(), v.domain.end(), *value);
    if (it == v.domain.end()) {
      throw InputError("policy row lookup: bad value '" + *value + "' for '" +
                       v.name + "'");
    }
    idx = idx * v.domain.size() + static_cast<std::size_t>(it - v.domain.begin());
  }
  return idx;
}

PartialAssignment PolicyTable::row_assignment(std::size_t row) const {
  PartialAssignment a;
  std::size_t rem = row;
  for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i) {
    const auto& v = scope[i];
    a.bind(v.name, v.domain[rem % v.domain.size()]);
    rem /= v.domain.size();
  }
  return a;
}

const std::vector<double>& PolicyTable::row_for(
    const PartialAssignment& full) const {
  return rows.at(row_index(full));
}

double PolicyTable::prob(const std::string& action_value,
                         const PartialAssignment& scope_assignment) const {
  auto it = std::find(action_domain.begin(), action_domain.end(), action_value);
  if (it == action_domain.end()) {
    throw InputError("policy: bad action value '" + action_value + "'");
  }
  return row_for(scope_assignment)[it - action_domain.begin()];
}

PolicyTable PolicyTable::uniform(const Ldag& g,
                                 const std::vector<std::string>& scope_vars) {
  PolicyTable p;
  p.action = g.action_name();
  p.action_domain = g.variable(g.action_index()).domain;
  for (const auto& name : scope_vars) {
    p.scope.push_back({name, g.variable(g.index_of(name)).domain});
  }
  std::vector<double> row(p.action_domain.size(),
                          1.0 / static_cast<double>(p.action_domain.size()));
  p.rows.assign(p.row_count(), row);
  p.row_notes.assign(p.row_count(), "");
  return p;
}

void PolicyTable::validate(double tol) const {
  if (rows.size() != row_count()) {
    throw InputError("policy: row count does not match the scope domain");
  }
  for (const auto& row : rows) {
    if (row.size() != action_domain.size()) {
      throw InputError("policy: row length does not match the action domain");
    }
    double sum = 0.0;
    for (double v : row) {
      if (v < -tol) throw InputError("policy: negative probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw InputError("policy: row does not sum to one");
    }
  }
}

std::string serialize_policy_json(const PolicyTable& p) {
  nlohmann::ordered_json j;
  j["action"] = p.action;
  j["action_domain"] = p.action_domain;
  j["scope"] = nlohmann::ordered_json::array();
  for (const auto& v : p.scope) j["scope"].push_back(v.name);
  j["shape_only"] = p.shape_only;
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    nlohmann::ordered_json jr;
    jr["given"] = p.row_assignment(r).to_key();
    jr["probs"] = p.rows[r];
    if (r < p.row_notes.size() && !p.row_notes[r].empty()) {
      jr["note"] = p.row_notes[r];
    }
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2);
}

}  // namespace csimit
