#include "csimit/ldag.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

const char* role_name(Role r) {
  switch (r) {
    case Role::Action:
      return "action";
    case Role::Reward:
      return "reward";
    case Role::Plain:
      return "plain";
  }
  return "plain";
}

Role role_from(const std::string& s) {
  if (s == "action") return Role::Action;
  if (s == "reward") return Role::Reward;
  if (s == "plain") return Role::Plain;
  throw InputError("unknown role '" + s + "' (expected action|reward|plain)");
}

std::set<int> reachable_down(const std::vector<std::vector<int>>& children,
                             int start) {
  std::set<int> out{start};
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int c : children[v]) {
      if (out.insert(c).second) q.push(c);
    }
  }
  return out;
}

}  // namespace

bool label_compatible(const PartialAssignment& label,
                      const PartialAssignment& context) {
  return label.compatible_with(context);
}

bool label_implied(const PartialAssignment& label,
                   const PartialAssignment& context) {
  return context.extends(label);
}

int Ldag::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("unknown variable '" + name + "'");
  return it->second;
}

std::optional<int> Ldag::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Ldag::parent_names(const std::string& name) const {
  std::vector<std::string> out;
  for (int p : parents_[index_of(name)]) out.push_back(variables_[p].name);
  return out;
}

bool Ldag::has_edge(const std::string& from, const std::string& to) const {
  return edge(from, to) != nullptr;
}

const LabeledEdge* Ldag::edge(const std::string& from,
                              const std::string& to) const {
  for (const auto& e : edges_) {
    if (e.from == from && e.to == to) return &e;
  }
  return nullptr;
}

void Ldag::build_adjacency() {
  index_.clear();
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    index_[variables_[i].name] = static_cast<int>(i);
  }
  parents_.assign(variables_.size(), {});
  children_.assign(variables_.size(), {});
  for (const auto& e : edges_) {
    int f = index_.at(e.from);
    int t = index_.at(e.to);
    parents_[t].push_back(f);
    children_[f].push_back(t);
  }
  for (auto& v : parents_) std::sort(v.begin(), v.end());
  for (auto& v : children_) std::sort(v.begin(), v.end());
}

std::vector<int> Ldag::topological_order() const {
  std::vector<int> indegree(variables_.size(), 0);
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    indegree[v] = static_cast<int>(parents_[v].size());
  }
  // min-index selection keeps the order deterministic
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (indegree[v] == 0) ready.push(static_cast<int>(v));
  }
  std::vector<int> order;
  order.reserve(variables_.size());
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != variables_.size()) {
    throw InputError("edge set contains a directed cycle");
  }
  return order;
}

std::vector<std::string> Ldag::observed_names() const {
  std::vector<std::string> out;
  for (const auto& v : variables_) {
    if (v.observed) out.push_back(v.name);
  }
  return out;
}

void Ldag::check_value(const std::string& var, const std::string& value) const {
  const auto& decl = variables_[index_of(var)];
  if (std::find(decl.domain.begin(), decl.domain.end(), value) ==
      decl.domain.end()) {
    throw InputError("value '" + value + "' not in the domain of '" + var +
                     "'");
  }
}

Ldag Ldag::create(std::vector<VariableDecl> variables,
                  std::vector<LabeledEdge> edges,
                  std::vector<std::string> policy_scope, Validation level) {
  Ldag g;
  g.variables_ = std::move(variables);
  g.edges_ = std::move(edges);
  g.policy_scope_ = std::move(policy_scope);

  if (g.variables_.empty()) throw InputError("graph has no variables");
  {
    std::set<std::string> seen;
    for (const auto& v : g.variables_) {
      if (v.name.empty()) throw InputError("empty variable name");
      if (!seen.insert(v.name).second) {
        throw InputError("duplicate variable '" + v.name + "'");
      }
      if (v.domain.size() < 2) {
        throw InputError("domain of '" + v.name + "' must have size >= 2");
      }
      std::set<std::string> vals(v.domain.begin(), v.domain.end());
      if (vals.size() != v.domain.size()) {
        throw InputError("duplicate domain value in '" + v.name + "'");
      }
    }
  }
  g.build_adjacency();

  for (const auto& e : g.edges_) {
    if (!g.find(e.from) || !g.find(e.to)) {
      throw InputError("edge " + e.from + "->" + e.to +
                       " references an unknown variable");
    }
    if (e.from == e.to) throw InputError("self-loop on '" + e.from + "'");
  }
  {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : g.edges_) {
      if (!seen.insert({e.from, e.to}).second) {
        throw InputError("duplicate edge " + e.from + "->" + e.to);
      }
    }
  }
  g.topological_order();  // throws on cycles

  g.action_ = -1;
  g.reward_ = -1;
  for (std::size_t i = 0; i < g.variables_.size(); ++i) {
    const auto& v = g.variables_[i];
    if (v.role == Role::Action) {
      if (g.action_ >= 0) throw InputError("more than one action variable");
      g.action_ = static_cast<int>(i);
    } else if (v.role == Role::Reward) {
      if (g.reward_ >= 0) throw InputError("more than one reward variable");
      g.reward_ = static_cast<int>(i);
    }
  }
  if (g.action_ < 0) throw InputError("no action variable declared");
  if (g.reward_ < 0) throw InputError("no reward variable declared");
  if (!g.variables_[g.action_].observed) {
    throw InputError("the action variable must be observed");
  }

  for (const auto& name : g.policy_scope_) {
    g.index_of(name);  // existence
  }
  {
    std::set<std::string> scope_seen;
    for (const auto& name : g.policy_scope_) {
      if (!scope_seen.insert(name).second) {
        throw InputError("duplicate policy-scope variable '" + name + "'");
      }
    }
  }

  // label values must lie in the declared domains
  for (const auto& e : g.edges_) {
    for (const auto& label : e.labels) {
      for (const auto& [var, value] : label.bindings()) {
        g.index_of(var);
        g.check_value(var, value);
      }
      if (label.empty()) {
        throw InputError("empty label on " + e.from + "->" + e.to);
      }
    }
  }

  if (level == Validation::Full) {
    // local-CSI well-formedness: vars(label) ⊆ Pa(to) \ {from}
    for (const auto& e : g.edges_) {
      for (const auto& label : e.labels) {
        for (const auto& [var, value] : label.bindings()) {
          if (var == e.from) {
            throw InputError("label on " + e.from + "->" + e.to +
                             " binds its own tail");
          }
          const auto& pa = g.parents_[g.index_of(e.to)];
          if (std::find(pa.begin(), pa.end(), g.index_of(var)) == pa.end()) {
            throw InputError("label on " + e.from + "->" + e.to + " binds '" +
                             var + "' which is not a parent of '" + e.to + "'");
          }
        }
      }
    }

    auto de_action = reachable_down(g.children_, g.action_);
    if (!de_action.count(g.reward_)) {
      throw InputError("the reward must be a descendant of the action");
    }
    for (const auto& name : g.policy_scope_) {
      int idx = g.index_of(name);
      if (!g.variables_[idx].observed) {
        throw InputError("policy-scope variable '" + name + "' is latent");
      }
      if (de_action.count(idx)) {
        throw InputError("policy-scope variable '" + name +
                         "' is a descendant of the action");
      }
    }
  }
  return g;
}

std::vector<std::string> context_variables(const Ldag& g) {
  std::set<std::string> seen;
  for (const auto& e : g.edges()) {
    for (const auto& label : e.labels) {
      for (const auto& [var, value] : label.bindings()) seen.insert(var);
    }
  }
  std::vector<std::string> out;
  for (const auto& v : g.variables()) {
    if (seen.count(v.name)) out.push_back(v.name);
  }
  return out;
}

namespace {

void check_context_binding(const Ldag& g, const PartialAssignment& w) {
  auto ctx = context_variables(g);
  std::set<std::string> ctx_set(ctx.begin(), ctx.end());
  for (const auto& [var, value] : w.bindings()) {
    if (!ctx_set.count(var)) {
      throw InputError("'" + var + "' is not a context variable");
    }
    g.check_value(var, value);
  }
}

Ldag rebuild(const Ldag& g, std::vector<LabeledEdge> edges) {
  return Ldag::create(g.variables(), std::move(edges), g.policy_scope(),
                      Ldag::Validation::Structural);
}

}  // namespace

Ldag context_induced_subgraph(const Ldag& g, const PartialAssignment& w) {
  check_context_binding(g, w);
  std::vector<LabeledEdge> kept;
  for (const auto& e : g.edges()) {
    if (w.binds(e.from) || w.binds(e.to)) continue;
    bool absent = false;
    for (const auto& label : e.labels) {
      if (label_implied(label, w)) {
        absent = true;
        break;
      }
    }
    if (absent) continue;
    LabeledEdge out{e.from, e.to, {}};
    for (const auto& label : e.labels) {
      if (label_compatible(label, w)) out.labels.push_back(label);
    }
    kept.push_back(std::move(out));
  }
  return rebuild(g, std::move(kept));
}

Ldag context_specific_dag(const Ldag& g, const PartialAssignment& c) {
  check_context_binding(g, c);
  std::vector<LabeledEdge> kept;
  for (const auto& e : g.edges()) {
    bool absent = false;
    for (const auto& label : e.labels) {
      if (label_implied(label, c)) {
        absent = true;
        break;
      }
    }
    if (absent) continue;
    LabeledEdge out{e.from, e.to, {}};
    for (const auto& label : e.labels) {
      if (label_compatible(label, c)) out.labels.push_back(label);
    }
    kept.push_back(std::move(out));
  }
  return rebuild(g, std::move(kept));
}

Ldag mutilate(const Ldag& g, const std::set<std::string>& remove_into,
              const std::set<std::string>& remove_outof) {
  for (const auto& name : remove_into) g.index_of(name);
  for (const auto& name : remove_outof) g.index_of(name);
  std::vector<LabeledEdge> kept;
  for (const auto& e : g.edges()) {
    if (remove_into.count(e.to) || remove_outof.count(e.from)) continue;
    kept.push_back(e);
  }
  return rebuild(g, std::move(kept));
}

Ldag strip_labels(const Ldag& g) {
  std::vector<LabeledEdge> kept;
  for (const auto& e : g.edges()) kept.push_back({e.from, e.to, {}});
  return rebuild(g, std::move(kept));
}

Ldag add_policy_edges(const Ldag& g) {
  std::vector<LabeledEdge> edges = g.edges();
  const auto& action = g.action_name();
  for (const auto& name : g.policy_scope()) {
    bool present = false;
    for (const auto& e : edges) {
      if (e.from == name && e.to == action) {
        present = true;
        break;
      }
    }
    if (!present) edges.push_back({name, action, {}});
  }
  return rebuild(g, std::move(edges));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

Ldag parse_ldag_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  try {
    std::vector<VariableDecl> vars;
    for (const auto& jv : j.at("variables")) {
      VariableDecl v;
      v.name = jv.at("name").get<std::string>();
      v.domain = jv.at("domain").get<std::vector<std::string>>();
      v.observed = jv.at("observed").get<bool>();
      v.role = role_from(jv.value("role", "plain"));
      vars.push_back(std::move(v));
    }
    std::vector<LabeledEdge> edges;
    for (const auto& je : j.value("edges", json::array())) {
      LabeledEdge e;
      e.from = je.at("from").get<std::string>();
      e.to = je.at("to").get<std::string>();
      for (const auto& jl : je.value("labels", json::array())) {
        PartialAssignment label;
        for (auto it = jl.begin(); it != jl.end(); ++it) {
          label.bind(it.key(), it.value().get<std::string>());
        }
        e.labels.push_back(std::move(label));
      }
      edges.push_back(std::move(e));
    }
    std::vector<std::string> scope =
        j.value("policy_scope", std::vector<std::string>{});
    return Ldag::create(std::move(vars), std::move(edges), std::move(scope));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

std::string serialize_ldag_json(const Ldag& g) {
  json j;
  j["variables"] = json::array();
  for (const auto& v : g.variables()) {
    json jv;
    jv["name"] = v.name;
    jv["domain"] = v.domain;
    jv["observed"] = v.observed;
    jv["role"] = role_name(v.role);
    j["variables"].push_back(std::move(jv));
  }
  j["edges"] = json::array();
  for (const auto& e : g.edges()) {
    json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["labels"] = json::array();
    for (const auto& label : e.labels) {
      json jl = json::object();
      for (const auto& [var, value] : label.bindings()) jl[var] = value;
      je["labels"].push_back(std::move(jl));
    }
    j["edges"].push_back(std::move(je));
  }
  j["policy_scope"] = g.policy_scope();
  return j.dump(2) + "\n";
}

}  // namespace csimit
