#include "csimit/imitability.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"

namespace csimit {

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Imitable:
      return "imitable";
    case Decision::NotImitable:
      return "not_imitable";
    case Decision::Unknown:
      return "unknown";
  }
  return "unknown";
}

int decision_exit_code(Decision d) {
  switch (d) {
    case Decision::Imitable:
      return 0;
    case Decision::NotImitable:
      return 2;
    case Decision::Unknown:
      return 3;
  }
  return 3;
}

std::optional<std::vector<std::string>> find_sep(
    const Ldag& g, const std::set<std::string>& required) {
  const std::string& x = g.action_name();
  const std::string& y = g.reward_name();
  std::set<std::string> seed = required;
  seed.insert(x);
  seed.insert(y);
  auto an = ancestors(g, seed);
  std::set<std::string> z;
  for (const auto& name : g.policy_scope()) {
    if (an.count(name)) z.insert(name);
  }
  Ldag cut = mutilate(g, {}, {x});
  if (!d_separated(cut, {x}, {y}, z)) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& v : g.variables()) {
    if (z.count(v.name)) out.push_back(v.name);
  }
  return out;
}

namespace {

bool reward_unaffected(const Ldag& g) {
  return descendants(g, {g.action_name()}).count(g.reward_name()) == 0;
}

// Enumerates full contexts over the context variables in lexicographic order
// of the declared variable order and domain order.
std::vector<PartialAssignment> enumerate_contexts(const Ldag& g,
                                                  std::uint64_t cap) {
  auto ctx = context_variables(g);
  std::uint64_t count = 1;
  for (const auto& name : ctx) {
    count *= g.variable(g.index_of(name)).domain.size();
    if (count > cap) {
      throw ResourceCapError("context space exceeds cap (" +
                             std::to_string(cap) + " contexts)");
    }
  }
  std::vector<PartialAssignment> out;
  out.reserve(count);
  std::vector<std::size_t> digits(ctx.size(), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    PartialAssignment c;
    for (std::size_t k = 0; k < ctx.size(); ++k) {
      c.bind(ctx[k], g.variable(g.index_of(ctx[k])).domain[digits[k]]);
    }
    out.push_back(std::move(c));
    for (int k = static_cast<int>(ctx.size()) - 1; k >= 0; --k) {
      if (++digits[k] < g.variable(g.index_of(ctx[k])).domain.size()) break;
      digits[k] = 0;
    }
  }
  return out;
}

bool scope_contains_all(const Ldag& g, const std::vector<std::string>& vars) {
  std::set<std::string> scope(g.policy_scope().begin(),
                              g.policy_scope().end());
  for (const auto& v : vars) {
    if (!scope.count(v)) return false;
  }
  return true;
}

}  // namespace

std::vector<ContextResult> corollary1_check(const Ldag& g,
                                            const DecisionOptions& opt) {
  auto contexts = enumerate_contexts(g, opt.context_cap);
  std::vector<ContextResult> results(contexts.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Ldag gc = context_induced_subgraph(g, contexts[i]);
      results[i] = {contexts[i], find_sep(gc)};
    }
  };
  unsigned threads = std::max(1u, opt.threads);
  if (threads == 1 || contexts.size() < 2) {
    work(0, contexts.size());
  } else {
    threads = std::min<unsigned>(threads, contexts.size());
    std::vector<std::thread> pool;
    std::size_t chunk = (contexts.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t b = t * chunk;
      std::size_t e = std::min(contexts.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return results;
}

ImitabilityVerdict classic_imitable(const Ldag& g,
                                    const std::optional<JointTable>& obs) {
  if (!context_variables(g).empty()) {
    throw InputError("classic_imitable: graph has labels; use imitate1");
  }
  return imitate1(g, obs);
}

ImitabilityVerdict imitate1(const Ldag& g,
                            const std::optional<JointTable>& obs,
                            const DecisionOptions& opt) {
  ImitabilityVerdict v;

  if (reward_unaffected(g)) {
    // the action cannot move the reward; any policy imitates
    v.decision = Decision::Imitable;
    v.policy = PolicyTable::uniform(g, {});
    v.policy->shape_only = !obs.has_value();
    v.notes.push_back(
        "reward is not a descendant of the action; any policy imitates");
    return v;
  }

  v.per_context = corollary1_check(g, opt);
  for (const auto& r : v.per_context) {
    if (!r.separator) {
      v.decision = Decision::NotImitable;
      v.witness = r.context;
      return v;
    }
  }

  auto ctx_vars = context_variables(g);
  {
    std::set<std::string> ctx_set(ctx_vars.begin(), ctx_vars.end());
    // Pa(C(L)) ⊆ C(L): every parent of a context variable is itself one.
    for (const auto& name : ctx_vars) {
      for (int p : g.parents(g.index_of(name))) {
        if (!ctx_set.count(g.variable(p).name)) {
          v.decision = Decision::Unknown;
          v.notes.push_back(
              "every context passed the necessary criterion, but sufficiency "
              "requires the context variables to have no parents outside the "
              "context set ('" +
              g.variable(p).name + "' -> '" + name + "' violates this)");
          return v;
        }
      }
    }
  }

  v.decision = Decision::Imitable;

  if (!scope_contains_all(g, ctx_vars)) {
    v.notes.push_back(
        "imitable, but the mixture policy needs every context variable inside "
        "the policy scope to dispatch on; returning per-context separators "
        "only");
    return v;
  }

  // scope of the assembled policy: context variables plus all separators
  std::set<std::string> scope_set(ctx_vars.begin(), ctx_vars.end());
  for (const auto& r : v.per_context) {
    for (const auto& name : *r.separator) scope_set.insert(name);
  }
  std::vector<std::string> scope_vars;
  for (const auto& var : g.variables()) {
    if (scope_set.count(var.name)) scope_vars.push_back(var.name);
  }

  PolicyTable policy = PolicyTable::uniform(g, scope_vars);
  policy.shape_only = !obs.has_value();

  if (obs) {
    std::map<std::string, const ContextResult*> by_context;
    for (const auto& r : v.per_context) {
      by_context[r.context.to_key()] = &r;
    }
    for (std::size_t row = 0; row < policy.row_count(); ++row) {
      PartialAssignment a = policy.row_assignment(row);
      PartialAssignment c = a.restrict_to(ctx_vars);
      const ContextResult* r = by_context.at(c.to_key());
      PartialAssignment given = c;
      for (const auto& name : *r->separator) {
        if (!given.binds(name)) given.bind(name, a.at(name));
      }
      try {
        policy.rows[row] = obs->distribution_of(g.action_name(), given);
      } catch (const ZeroMassContext&) {
        policy.row_notes[row] = "zero-mass context; row filled uniform";
      }
    }
  }
  v.policy = std::move(policy);
  return v;
}

std::string serialize_verdict_json(const ImitabilityVerdict& v) {
  nlohmann::ordered_json j;
  j["decision"] = decision_name(v.decision);
  if (v.witness) j["witness"] = v.witness->to_key();
  if (!v.per_context.empty()) {
    j["per_context"] = nlohmann::ordered_json::array();
    for (const auto& r : v.per_context) {
      nlohmann::ordered_json jr;
      jr["context"] = r.context.to_key();
      if (r.separator) {
        jr["separator"] = *r.separator;
      } else {
        jr["separator"] = nullptr;
      }
      j["per_context"].push_back(std::move(jr));
    }
  }
  if (v.policy) {
    j["policy"] = nlohmann::ordered_json::parse(serialize_policy_json(*v.policy));
  }
  if (!v.notes.empty()) j["notes"] = v.notes;
  return j.dump(2);
}

}  // namespace csimit
