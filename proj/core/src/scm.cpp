#include "csimit/scm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

constexpr double kRowSumTol = 1e-12;

std::vector<std::size_t> parent_strides(const Ldag& g, const Cpt& cpt) {
  std::vector<std::size_t> strides(cpt.parents.size(), 1);
  for (int i = static_cast<int>(cpt.parents.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] *
                 g.variable(g.index_of(cpt.parents[i + 1])).domain.size();
  }
  return strides;
}

std::size_t parent_row_count(const Ldag& g, const Cpt& cpt) {
  std::size_t n = 1;
  for (const auto& p : cpt.parents) {
    n *= g.variable(g.index_of(p)).domain.size();
  }
  return n;
}

PartialAssignment parent_assignment(const Ldag& g, const Cpt& cpt,
                                    std::size_t row) {
  PartialAssignment a;
  std::size_t rem = row;
  for (int i = static_cast<int>(cpt.parents.size()) - 1; i >= 0; --i) {
    const auto& dom = g.variable(g.index_of(cpt.parents[i])).domain;
    a.bind(cpt.parents[i], dom[rem % dom.size()]);
    rem /= dom.size();
  }
  return a;
}

std::vector<JointTable::Var> full_scope(const Ldag& g) {
  std::vector<JointTable::Var> scope;
  scope.reserve(g.size());
  for (const auto& v : g.variables()) scope.push_back({v.name, v.domain});
  return scope;
}

// Enumerates the product of per-variable factors over the full joint domain.
// `factor(v, digits)` returns P(v-digit | parent digits) for one cell.
template <typename FactorFn>
JointTable enumerate_product(const Ldag& g, std::uint64_t cap,
                             FactorFn&& factor) {
  auto scope = full_scope(g);
  std::uint64_t states = 1;
  for (const auto& v : scope) {
    states *= v.domain.size();
    if (states > cap) {
      throw ResourceCapError("joint state space exceeds cap (" +
                             std::to_string(cap) + ")");
    }
  }
  JointTable t = JointTable::zeros(std::move(scope));
  const int n = static_cast<int>(g.size());
  std::vector<int> digits(n, 0);
  for (std::size_t cell = 0; cell < t.size(); ++cell) {
    double p = 1.0;
    for (int v = 0; v < n && p != 0.0; ++v) {
      p *= factor(v, digits);
    }
    t[cell] = p;
    for (int v = n - 1; v >= 0; --v) {
      if (++digits[v] < static_cast<int>(g.variable(v).domain.size())) break;
      digits[v] = 0;
    }
  }
  return t;
}

}  // namespace

DiscreteScm DiscreteScm::create(Ldag graph, std::vector<Cpt> cpts,
                                std::vector<std::string> notes) {
  DiscreteScm m(std::move(graph));
  m.notes_ = std::move(notes);
  m.cpts_.resize(m.graph_.size());

  std::vector<bool> seen(m.graph_.size(), false);
  for (auto& cpt : cpts) {
    int idx = m.graph_.index_of(cpt.child);
    if (seen[idx]) throw InputError("duplicate CPT for '" + cpt.child + "'");
    seen[idx] = true;

    // canonicalize parent order to declaration order and check the set
    auto expected = m.graph_.parent_names(cpt.child);
    std::vector<std::string> given = cpt.parents;
    std::sort(given.begin(), given.end());
    std::vector<std::string> expected_sorted = expected;
    std::sort(expected_sorted.begin(), expected_sorted.end());
    if (given != expected_sorted) {
      throw InputError("CPT parents of '" + cpt.child +
                       "' do not match the graph parents");
    }
    if (cpt.parents != expected) {
      throw InputError("CPT parents of '" + cpt.child +
                       "' must be listed in declaration order");
    }

    const auto& dom = m.graph_.variable(idx).domain;
    if (cpt.rows.size() != parent_row_count(m.graph_, cpt)) {
      throw InputError("CPT of '" + cpt.child +
                       "' has the wrong number of rows");
    }
    for (const auto& row : cpt.rows) {
      if (row.size() != dom.size()) {
        throw InputError("CPT row of '" + cpt.child + "' has wrong arity");
      }
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) {
          throw InputError("negative probability in CPT of '" + cpt.child +
                           "'");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        throw InputError("CPT row of '" + cpt.child +
                         "' does not sum to one");
      }
    }
    m.cpts_[idx] = std::move(cpt);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw InputError("missing CPT for '" + m.graph_.variable(i).name + "'");
    }
  }
  return m;
}

JointTable joint_distribution(const DiscreteScm& m, std::uint64_t cap) {
  const auto& g = m.graph();
  std::vector<std::vector<std::size_t>> strides;
  std::vector<std::vector<int>> parent_idx;
  for (std::size_t v = 0; v < g.size(); ++v) {
    strides.push_back(parent_strides(g, m.cpt(static_cast<int>(v))));
    std::vector<int> idx;
    for (const auto& p : m.cpt(static_cast<int>(v)).parents) {
      idx.push_back(g.index_of(p));
    }
    parent_idx.push_back(std::move(idx));
  }
  return enumerate_product(
      g, cap, [&](int v, const std::vector<int>& digits) {
        std::size_t row = 0;
        for (std::size_t k = 0; k < parent_idx[v].size(); ++k) {
          row += strides[v][k] * digits[parent_idx[v][k]];
        }
        return m.cpt(v).rows[row][digits[v]];
      });
}

JointTable interventional(const DiscreteScm& m, const PolicyTable& policy,
                          std::uint64_t cap) {
  const auto& g = m.graph();
  if (policy.action != g.action_name()) {
    throw InputError("policy action does not match the graph action");
  }
  const std::set<std::string> scope_allowed(g.policy_scope().begin(),
                                            g.policy_scope().end());
  for (const auto& v : policy.scope) {
    if (!scope_allowed.count(v.name)) {
      throw InputError("policy conditions on '" + v.name +
                       "' outside the policy scope");
    }
  }
  policy.validate();

  const int action = g.action_index();
  // policy scope positions in the joint digit vector + row strides
  std::vector<int> scope_idx;
  for (const auto& v : policy.scope) scope_idx.push_back(g.index_of(v.name));
  std::vector<std::size_t> strides(policy.scope.size(), 1);
  for (int i = static_cast<int>(policy.scope.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * policy.scope[i + 1].domain.size();
  }

  std::vector<std::vector<std::size_t>> cpt_strides;
  std::vector<std::vector<int>> parent_idx;
  for (std::size_t v = 0; v < g.size(); ++v) {
    cpt_strides.push_back(parent_strides(g, m.cpt(static_cast<int>(v))));
    std::vector<int> idx;
    for (const auto& p : m.cpt(static_cast<int>(v)).parents) {
      idx.push_back(g.index_of(p));
    }
    parent_idx.push_back(std::move(idx));
  }

  return enumerate_product(
      g, cap, [&](int v, const std::vector<int>& digits) {
        if (v == action) {
          std::size_t row = 0;
          for (std::size_t k = 0; k < scope_idx.size(); ++k) {
            row += strides[k] * digits[scope_idx[k]];
          }
          return policy.rows[row][digits[v]];
        }
        std::size_t row = 0;
        for (std::size_t k = 0; k < parent_idx[v].size(); ++k) {
          row += cpt_strides[v][k] * digits[parent_idx[v][k]];
        }
        return m.cpt(v).rows[row][digits[v]];
      });
}

JointTable interventional(const DiscreteScm& m, const PartialAssignment& do_x,
                          std::uint64_t cap) {
  const auto& g = m.graph();
  auto x = do_x.get(g.action_name());
  if (do_x.size() != 1 || !x) {
    throw InputError("point intervention must bind exactly the action");
  }
  g.check_value(g.action_name(), *x);
  PolicyTable point;
  point.action = g.action_name();
  point.action_domain = g.variable(g.action_index()).domain;
  std::vector<double> row(point.action_domain.size(), 0.0);
  auto it = std::find(point.action_domain.begin(), point.action_domain.end(),
                      *x);
  row[it - point.action_domain.begin()] = 1.0;
  point.rows.push_back(std::move(row));
  return interventional(m, point, cap);
}

std::vector<CsiViolation> validate_csi(const DiscreteScm& m) {
  std::vector<CsiViolation> out;
  const auto& g = m.graph();
  for (const auto& e : g.edges()) {
    if (e.labels.empty()) continue;
    const Cpt& cpt = m.cpt(e.to);
    auto rows = cpt.rows.size();
    for (const auto& label : e.labels) {
      // group rows extending the label by their non-tail parent assignment
      std::map<std::string, std::pair<std::size_t, bool>> reference;
      CsiViolation worst;
      worst.from = e.from;
      worst.to = e.to;
      worst.label = label;
      bool violated = false;
      for (std::size_t r = 0; r < rows; ++r) {
        PartialAssignment pa = parent_assignment(g, cpt, r);
        if (!pa.extends(label)) continue;
        PartialAssignment key = pa;
        PartialAssignment rest;
        for (const auto& [var, value] : key.bindings()) {
          if (var != e.from) rest.bind(var, value);
        }
        auto [it, fresh] =
            reference.try_emplace(rest.to_key(), std::make_pair(r, true));
        if (fresh) continue;
        std::size_t r0 = it->second.first;
        double gap = 0.0;
        for (std::size_t k = 0; k < cpt.rows[r].size(); ++k) {
          gap = std::max(gap, std::abs(cpt.rows[r][k] - cpt.rows[r0][k]));
        }
        if (gap > kRowSumTol && gap > worst.max_gap) {
          violated = true;
          worst.max_gap = gap;
          worst.row_a = parent_assignment(g, cpt, r0).to_key();
          worst.row_b = pa.to_key();
        }
      }
      if (violated) out.push_back(worst);
    }
  }
  return out;
}

Dataset sample(const DiscreteScm& m, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample: n must be >= 1");
  const auto& g = m.graph();
  Dataset data;
  for (const auto& v : g.variables()) {
    data.columns.push_back(v.name);
    data.domains.push_back(v.domain);
  }
  auto order = g.topological_order();

  std::vector<std::vector<std::size_t>> strides;
  std::vector<std::vector<int>> parent_idx;
  for (std::size_t v = 0; v < g.size(); ++v) {
    strides.push_back(parent_strides(g, m.cpt(static_cast<int>(v))));
    std::vector<int> idx;
    for (const auto& p : m.cpt(static_cast<int>(v)).parents) {
      idx.push_back(g.index_of(p));
    }
    parent_idx.push_back(std::move(idx));
  }

  std::mt19937_64 rng(seed);
  // explicit inverse-CDF draw from the top 53 bits keeps output identical
  // across standard libraries
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  data.rows.reserve(n);
  std::vector<int> record(g.size(), 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (int v : order) {
      std::size_t row = 0;
      for (std::size_t k = 0; k < parent_idx[v].size(); ++k) {
        row += strides[v][k] * record[parent_idx[v][k]];
      }
      const auto& dist = m.cpt(v).rows[row];
      double u = uniform();
      double cum = 0.0;
      int drawn = static_cast<int>(dist.size()) - 1;
      for (std::size_t k = 0; k < dist.size(); ++k) {
        cum += dist[k];
        if (u < cum) {
          drawn = static_cast<int>(k);
          break;
        }
      }
      record[v] = drawn;
    }
    data.rows.push_back(record);
  }
  return data;
}

JointTable estimate_joint(const Dataset& data,
                          const std::vector<std::string>& vars, double alpha) {
  std::vector<int> cols;
  std::vector<JointTable::Var> scope;
  for (std::size_t c = 0; c < data.columns.size(); ++c) {
    if (std::find(vars.begin(), vars.end(), data.columns[c]) != vars.end()) {
      cols.push_back(static_cast<int>(c));
      scope.push_back({data.columns[c], data.domains[c]});
    }
  }
  if (scope.size() != vars.size()) {
    throw InputError("estimate_joint: unknown variable requested");
  }
  JointTable t = JointTable::zeros(std::move(scope));
  std::vector<int> digits(cols.size());
  for (const auto& row : data.rows) {
    for (std::size_t k = 0; k < cols.size(); ++k) digits[k] = row[cols[k]];
    t[t.flat_index(digits)] += 1.0;
  }
  if (alpha > 0.0) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += alpha;
  }
  t.normalize();
  t.set_estimated_from(data.rows.size());
  return t;
}

std::string Dataset::to_csv() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) os << ',';
    os << columns[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << domains[c][row[c]];
    }
    os << '\n';
  }
  return os.str();
}

Dataset Dataset::from_csv(const std::string& text) {
  Dataset data;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InputError("empty CSV");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) data.columns.push_back(cell);
  }
  std::vector<std::map<std::string, int>> value_ids(data.columns.size());
  data.domains.resize(data.columns.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    std::vector<int> row;
    std::size_t c = 0;
    while (std::getline(rs, cell, ',')) {
      if (c >= data.columns.size()) throw InputError("CSV row too long");
      auto [it, fresh] = value_ids[c].try_emplace(
          cell, static_cast<int>(data.domains[c].size()));
      if (fresh) data.domains[c].push_back(cell);
      row.push_back(it->second);
      ++c;
    }
    if (c != data.columns.size()) throw InputError("CSV row too short");
    data.rows.push_back(std::move(row));
  }
  // canonicalize: domains sorted, indices remapped, so round trips are stable
  for (std::size_t c = 0; c < data.columns.size(); ++c) {
    std::vector<std::string> sorted = data.domains[c];
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> remap(data.domains[c].size());
    for (std::size_t old = 0; old < data.domains[c].size(); ++old) {
      remap[old] = static_cast<int>(
          std::find(sorted.begin(), sorted.end(), data.domains[c][old]) -
          sorted.begin());
    }
    for (auto& row : data.rows) row[c] = remap[row[c]];
    data.domains[c] = std::move(sorted);
  }
  return data;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

DiscreteScm parse_scm_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  try {
    Ldag g = parse_ldag_json(j.at("graph").dump());
    std::vector<Cpt> cpts;
    std::vector<std::string> notes;
    for (const auto& jc : j.at("cpts")) {
      Cpt cpt;
      cpt.child = jc.at("child").get<std::string>();
      cpt.parents = g.parent_names(cpt.child);
      std::size_t nrows = 1;
      for (const auto& p : cpt.parents) {
        nrows *= g.variable(g.index_of(p)).domain.size();
      }
      const auto& table = jc.at("table");
      cpt.rows.resize(nrows);
      std::set<std::string> consumed;
      for (std::size_t r = 0; r < nrows; ++r) {
        std::string key = parent_assignment(g, cpt, r).to_key();
        if (table.contains(key)) {
          cpt.rows[r] = table.at(key).get<std::vector<double>>();
          consumed.insert(key);
        } else {
          const auto& dom = g.variable(g.index_of(cpt.child)).domain;
          cpt.rows[r].assign(dom.size(), 1.0 / dom.size());
          notes.push_back("CPT of '" + cpt.child + "' row {" + key +
                          "} unspecified; filled uniform");
        }
      }
      for (auto it = table.begin(); it != table.end(); ++it) {
        if (!consumed.count(it.key())) {
          throw InputError("CPT of '" + cpt.child + "' has unknown row key '" +
                           it.key() + "'");
        }
      }
      cpts.push_back(std::move(cpt));
    }
    return DiscreteScm::create(std::move(g), std::move(cpts), std::move(notes));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
}

std::string serialize_scm_json(const DiscreteScm& m) {
  json j;
  j["graph"] = json::parse(serialize_ldag_json(m.graph()));
  j["cpts"] = json::array();
  for (std::size_t v = 0; v < m.graph().size(); ++v) {
    const Cpt& cpt = m.cpt(static_cast<int>(v));
    json jc;
    jc["child"] = cpt.child;
    jc["parents"] = cpt.parents;
    json table = json::object();
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      table[parent_assignment(m.graph(), cpt, r).to_key()] = cpt.rows[r];
    }
    jc["table"] = std::move(table);
    j["cpts"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

}  // namespace csimit
