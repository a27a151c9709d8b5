#include "csimit/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>

#include <nlohmann/json.hpp>

#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"
#include "csimit/lsq.hpp"

namespace csimit {

namespace {

std::vector<std::string> decl_ordered(const Ldag& g,
                                      const std::set<std::string>& s) {
  std::vector<std::string> out;
  for (const auto& v : g.variables()) {
    if (s.count(v.name)) out.push_back(v.name);
  }
  return out;
}

std::set<std::string> scope_set(const Ldag& g) {
  return {g.policy_scope().begin(), g.policy_scope().end()};
}

// Assignments over `vars` in lexicographic (declaration, domain) order.
std::vector<PartialAssignment> assignments_over(
    const Ldag& g, const std::vector<std::string>& vars) {
  std::vector<PartialAssignment> out;
  std::vector<std::size_t> digits(vars.size(), 0);
  while (true) {
    PartialAssignment a;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      a.bind(vars[k], g.variable(g.index_of(vars[k])).domain[digits[k]]);
    }
    out.push_back(std::move(a));
    int k = static_cast<int>(vars.size()) - 1;
    for (; k >= 0; --k) {
      if (++digits[k] < g.variable(g.index_of(vars[k])).domain.size()) break;
      digits[k] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

// Subsets of `pool` by ascending size, ties in declaration-lexicographic
// order; the empty subset first.
std::vector<std::vector<std::string>> subsets_small_first(
    const std::vector<std::string>& pool) {
  std::vector<std::vector<std::string>> out;
  const std::size_t n = pool.size();
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<std::string> sub;
      for (auto i : idx) sub.push_back(pool[i]);
      out.push_back(std::move(sub));
      if (size == 0) break;
      int k = static_cast<int>(size) - 1;
      while (k >= 0 && idx[k] == n - size + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (std::size_t j = k + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::string IdFormula::provenance() const {
  std::string s_key;
  for (const auto& name : surrogate) {
    if (!s_key.empty()) s_key += ",";
    s_key += name;
  }
  std::string out = "P(" + s_key + " | do(x)";
  if (!context.empty()) out += ", " + context.to_key();
  out += ") = ";
  if (rule == Rule::Direct) {
    out += "identified on the context graph";
  } else {
    out += "P(" + s_key + " | x";
    if (!context.empty()) out += ", " + context.to_key();
    if (!extension.empty()) out += ", " + extension.to_key();
    out += ")";
  }
  return out;
}

JointTable IdFormula::evaluate(const Ldag& g, const JointTable& obs,
                               const std::string& x_value) const {
  auto s_vars = decl_ordered(g, surrogate);
  if (rule == Rule::ContextTransport) {
    PartialAssignment given = context.merged_with(extension);
    given.bind(g.action_name(), x_value);
    return obs.condition(given).marginal(s_vars);
  }
  // Direct: run the identification recursion on the context graph and
  // condition the identified joint P(s, vars(c) | do(x)) on the context.
  Ldag gc = context_specific_dag(g, context);
  Admg admg = latent_project(gc);
  std::set<std::string> targets = surrogate;
  for (const auto& [var, value] : context.bindings()) targets.insert(var);
  auto f = identify_effect(admg, obs, targets, g.action_name());
  if (!f) {
    throw InputError("formula evaluation: effect unexpectedly unidentified");
  }
  PartialAssignment slice = context;
  slice.bind(g.action_name(), x_value);
  // keep only the do(x) slice, then renormalize over the context mass
  std::vector<JointTable::Var> s_scope;
  for (const auto& v : f->scope()) {
    if (surrogate.count(v.name)) s_scope.push_back(v);
  }
  JointTable out = JointTable::zeros(s_scope);
  double z = 0.0;
  for (std::size_t cell = 0; cell < f->size(); ++cell) {
    if (!f->consistent(cell, slice)) continue;
    z += (*f)[cell];
  }
  if (z <= 0.0) {
    throw ZeroMassContext("identified effect has zero mass at {" +
                          slice.to_key() + "}");
  }
  for (std::size_t cell = 0; cell < f->size(); ++cell) {
    if (!f->consistent(cell, slice)) continue;
    std::vector<int> digits;
    for (const auto& v : out.scope()) {
      digits.push_back(f->digit(cell, f->var_position(v.name)));
    }
    out[out.flat_index(digits)] += (*f)[cell];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= z;
  return out;
}

namespace {

struct SurrogateSearch {
  Ldag supergraph;  // context-specific DAG plus policy edges
  std::set<std::string> allowed;
  std::set<std::string> required;
};

SurrogateSearch surrogate_search_space(const Ldag& g,
                                       const PartialAssignment& c) {
  SurrogateSearch out{add_policy_edges(context_specific_dag(g, c)), {}, {}};
  for (const auto& v : g.variables()) {
    if (v.observed && v.name != g.action_name() && v.name != g.reward_name()) {
      out.allowed.insert(v.name);
    }
  }
  for (const auto& [var, value] : c.bindings()) out.required.insert(var);
  return out;
}

// Canonical minimal separator first, then up to `extra` further minimal
// separators in (size, declaration-lex) order. All contain `required`.
std::vector<std::set<std::string>> minimal_separator_candidates(
    const Ldag& g, const SurrogateSearch& space, std::size_t extra) {
  std::vector<std::set<std::string>> out;
  auto canonical =
      find_min_sep(space.supergraph, g.action_name(), g.reward_name(),
                   space.required, space.allowed);
  if (!canonical) return out;
  out.emplace_back(canonical->begin(), canonical->end());
  if (extra == 0) return out;

  std::vector<std::string> pool;
  for (const auto& v : g.variables()) {
    if (space.allowed.count(v.name) && !space.required.count(v.name)) {
      pool.push_back(v.name);
    }
  }
  if (pool.size() > 12) return out;  // alternates only at desk scale

  const std::string& x = g.action_name();
  const std::string& y = g.reward_name();
  auto separates = [&](const std::set<std::string>& z) {
    return d_separated(space.supergraph, {x}, {y}, z);
  };
  for (const auto& sub : subsets_small_first(pool)) {
    if (out.size() >= 1 + extra) break;
    std::set<std::string> z = space.required;
    z.insert(sub.begin(), sub.end());
    if (std::find(out.begin(), out.end(), z) != out.end()) continue;
    if (!separates(z)) continue;
    bool minimal = true;
    for (const auto& name : sub) {
      std::set<std::string> smaller = z;
      smaller.erase(name);
      if (separates(smaller)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(std::move(z));
  }
  return out;
}

}  // namespace

std::optional<std::set<std::string>> context_specific_surrogate(
    const Ldag& g, const PartialAssignment& c) {
  auto space = surrogate_search_space(g, c);
  auto sep = find_min_sep(space.supergraph, g.action_name(), g.reward_name(),
                          space.required, space.allowed);
  if (!sep) return std::nullopt;
  std::set<std::string> out(sep->begin(), sep->end());
  for (const auto& [var, value] : c.bindings()) out.erase(var);
  return out;
}

CsiIdentifyResult csi_identify(const Ldag& g, const std::set<std::string>& s,
                               const PartialAssignment& c,
                               const JointTable* obs) {
  const std::string& x = g.action_name();
  if (s.count(x)) {
    return NotIdentifiedDiag{"surrogate set contains the action"};
  }
  for (const auto& [var, value] : c.bindings()) {
    if (s.count(var)) {
      return NotIdentifiedDiag{"surrogate set overlaps the context"};
    }
  }

  // The equation system treats the estimand as constant across the policy
  // scope within the context; that is only sound when the remaining scope
  // variables are irrelevant to s once X is intervened on.
  auto scope = scope_set(g);
  std::set<std::string> rest;
  for (const auto& name : scope) {
    if (!c.binds(name)) rest.insert(name);
  }
  for (const auto& name : rest) {
    if (s.count(name)) {
      return NotIdentifiedDiag{
          "surrogate overlaps the free policy scope; a transported estimand "
          "cannot gate on it"};
    }
  }
  Ldag gc = context_specific_dag(g, c);
  if (!rest.empty() && !s.empty()) {
    Ldag cut = mutilate(gc, {x}, {});
    if (!d_separated(cut, s, rest, [&] {
          std::set<std::string> z;
          for (const auto& [var, value] : c.bindings()) z.insert(var);
          return z;
        }())) {
      return NotIdentifiedDiag{
          "free policy-scope variables stay relevant to the surrogate after "
          "intervening on the action"};
    }
  }

  if (s.empty()) {
    // X and Y already separated by the context alone; any policy matches.
    IdFormula f;
    f.rule = IdFormula::Rule::ContextTransport;
    f.surrogate = s;
    f.context = c;
    return f;
  }

  // Direct route: the plain identification algorithm on the context graph.
  {
    Admg admg = latent_project(gc);
    std::set<std::string> targets = s;
    for (const auto& [var, value] : c.bindings()) targets.insert(var);
    bool targets_ok = true;
    for (const auto& t : targets) {
      if (!g.variable(g.index_of(t)).observed || t == x) targets_ok = false;
    }
    if (targets_ok && obs) {
      auto f = identify_effect(admg, *obs, targets, x);
      if (f) {
        IdFormula out;
        out.rule = IdFormula::Rule::Direct;
        out.surrogate = s;
        out.context = c;
        try {
          for (const auto& value : g.variable(g.index_of(x)).domain) {
            out.evaluate(g, *obs, value);  // degeneracy probe
          }
          return out;
        } catch (const ZeroMassContext&) {
          // fall through to the transport route
        }
      }
    }
    // Without data the direct estimand cannot be probed; transport-route
    // certificates below are purely graphical.
  }

  // Context transport: find an extension c'' of the context under which the
  // action has no open backdoor to s, with s insensitive to c'' after the
  // intervention; then P(s|do(x),c) = P(s|x,c,c'').
  std::vector<std::string> pool;
  {
    auto ctx = context_variables(g);
    for (const auto& name : ctx) {
      if (scope.count(name) && !c.binds(name) && !s.count(name)) {
        pool.push_back(name);
      }
    }
  }
  std::string positivity_note;
  for (const auto& sub : subsets_small_first(pool)) {
    for (const auto& c2 : assignments_over(g, sub)) {
      PartialAssignment joint_ctx;
      try {
        joint_ctx = c.merged_with(c2);
      } catch (const std::invalid_argument&) {
        continue;
      }
      Ldag gext = context_specific_dag(g, joint_ctx);
      if (!c2.empty()) {
        std::set<std::string> c2_vars;
        for (const auto& [var, value] : c2.bindings()) c2_vars.insert(var);
        std::set<std::string> c_vars;
        for (const auto& [var, value] : c.bindings()) c_vars.insert(var);
        Ldag cut_in = mutilate(gext, {x}, {});
        if (!d_separated(cut_in, s, c2_vars, c_vars)) continue;
      }
      {
        std::set<std::string> given;
        for (const auto& [var, value] : joint_ctx.bindings()) given.insert(var);
        Ldag cut_out = mutilate(gext, {}, {x});
        if (!d_separated(cut_out, {x}, s, given)) continue;
      }
      if (obs) {
        bool positive = true;
        for (const auto& value : g.variable(g.index_of(x)).domain) {
          PartialAssignment cell = joint_ctx;
          cell.bind(x, value);
          if (obs->mass(cell) <= 0.0) {
            positive = false;
            positivity_note = "positivity failure at {" + cell.to_key() + "}";
            break;
          }
        }
        if (!positive) continue;
      }
      IdFormula out;
      out.rule = IdFormula::Rule::ContextTransport;
      out.surrogate = s;
      out.context = c;
      out.extension = c2;
      return out;
    }
  }
  std::string reason = "no identifying context extension found";
  if (!positivity_note.empty()) reason += "; " + positivity_note;
  return NotIdentifiedDiag{reason};
}

PolicyEquationSystem build_equation_system(const Ldag& g,
                                           const std::set<std::string>& s,
                                           const PartialAssignment& c,
                                           const IdFormula& formula,
                                           const JointTable& obs) {
  PolicyEquationSystem sys;
  sys.context = c;
  sys.action_domain = g.variable(g.action_index()).domain;

  std::vector<std::string> rest;
  for (const auto& name : g.policy_scope()) {
    if (!c.binds(name)) rest.push_back(name);
  }
  for (const auto& name : rest) {
    sys.unknown_scope.push_back({name, g.variable(g.index_of(name)).domain});
  }

  if (obs.estimated_from()) {
    double n = static_cast<double>(*obs.estimated_from());
    double cells = static_cast<double>(std::max<std::size_t>(obs.size(), 2));
    sys.tolerance = std::max(1e-8, 3.0 * std::sqrt(std::log(cells) / n));
    sys.notes.push_back("sampled input: tolerance scaled to " +
                        std::to_string(sys.tolerance));
  }

  const auto rest_cells = assignments_over(g, rest);
  const std::size_t nx = sys.action_domain.size();
  const std::size_t ncols = rest_cells.size() * nx;
  sys.blocks.resize(rest_cells.size());
  for (std::size_t r = 0; r < rest_cells.size(); ++r) {
    for (std::size_t k = 0; k < nx; ++k) {
      sys.blocks[r].push_back(static_cast<int>(r * nx + k));
    }
  }

  double c_mass = c.empty() ? 1.0 : obs.mass(c);
  if (c_mass <= 0.0) {
    sys.vacuous = true;
    sys.notes.push_back("zero-mass context {" + c.to_key() +
                        "}; any stochastic table solves");
    sys.A = Eigen::MatrixXd::Zero(0, ncols);
    sys.b = Eigen::VectorXd::Zero(0);
    return sys;
  }

  if (s.empty()) {
    sys.vacuous = true;
    sys.notes.push_back("empty surrogate; constraints are vacuous");
    sys.A = Eigen::MatrixXd::Zero(0, ncols);
    sys.b = Eigen::VectorXd::Zero(0);
    return sys;
  }

  auto s_vars = decl_ordered(g, s);
  JointTable target = obs.condition(c).marginal(s_vars);
  const std::size_t nrows = target.size();

  // effect tables per action value (constant across the free scope cells)
  std::vector<JointTable> effect;
  for (const auto& value : sys.action_domain) {
    effect.push_back(formula.evaluate(g, obs, value));
  }

  sys.A = Eigen::MatrixXd::Zero(nrows, ncols);
  sys.b = Eigen::VectorXd::Zero(nrows);
  for (std::size_t row = 0; row < nrows; ++row) sys.b[row] = target[row];

  JointTable cond = c.empty() ? obs : obs.condition(c);
  for (std::size_t r = 0; r < rest_cells.size(); ++r) {
    double w = rest.empty() ? 1.0 : cond.mass(rest_cells[r]);
    if (w <= 0.0) {
      sys.notes.push_back("free-scope cell {" + rest_cells[r].to_key() +
                          "} has zero mass; its policy row is unconstrained");
    }
    for (std::size_t k = 0; k < nx; ++k) {
      const auto& fx = effect[k];
      for (std::size_t row = 0; row < nrows; ++row) {
        sys.A(row, r * nx + k) = fx[row] * w;
      }
    }
  }
  return sys;
}

std::optional<PolicySolve> solve_policy_equations(
    const PolicyEquationSystem& sys) {
  PolicySolve out;
  out.fragment.action_domain = sys.action_domain;
  out.fragment.scope = sys.unknown_scope;

  const std::size_t nx = sys.action_domain.size();
  auto solution = solve_simplex_least_squares(sys.A, sys.b, sys.blocks);
  out.residual = solution.residual_inf;
  if (!sys.vacuous && out.residual > sys.tolerance) return std::nullopt;

  out.fragment.rows.resize(sys.blocks.size());
  out.fragment.row_notes.assign(sys.blocks.size(), "");
  for (std::size_t r = 0; r < sys.blocks.size(); ++r) {
    std::vector<double> row(nx);
    double sum = 0.0;
    for (std::size_t k = 0; k < nx; ++k) {
      row[k] = std::max(0.0, solution.x[sys.blocks[r][k]]);
      sum += row[k];
    }
    if (sum <= 0.0) {
      row.assign(nx, 1.0 / static_cast<double>(nx));
    } else {
      for (double& v : row) v /= sum;
    }
    out.fragment.rows[r] = std::move(row);
  }
  return out;
}

namespace {

struct SubImitateState {
  const Ldag& g;
  const JointTable& obs;
  const Imitate2Options& opt;
  std::vector<BranchInfo>* branches;
  std::mutex branch_mutex;
  double tolerance_used = 1e-8;
};

std::optional<PolicyTable> sub_imitate(SubImitateState& st,
                                       const std::vector<std::string>& cset,
                                       const PartialAssignment& c,
                                       unsigned depth);

std::optional<PolicyTable> assemble_split(
    SubImitateState& st, const std::vector<std::string>& cset,
    const PartialAssignment& c, const std::string& v,
    std::vector<std::optional<PolicyTable>> parts) {
  const Ldag& g = st.g;
  for (const auto& part : parts) {
    if (!part) return std::nullopt;
  }
  std::vector<std::string> rest;
  for (const auto& name : g.policy_scope()) {
    if (!c.binds(name)) rest.push_back(name);
  }
  PolicyTable out = PolicyTable::uniform(g, rest);
  const auto& dom = g.variable(g.index_of(v)).domain;
  for (std::size_t row = 0; row < out.row_count(); ++row) {
    PartialAssignment a = out.row_assignment(row);
    const std::string& value = a.at(v);
    std::size_t which =
        std::find(dom.begin(), dom.end(), value) - dom.begin();
    const PolicyTable& part = *parts[which];
    out.rows[row] = part.row_for(a);
    std::size_t part_row = part.row_index(a);
    if (part_row < part.row_notes.size()) {
      out.row_notes[row] = part.row_notes[part_row];
    }
  }
  return out;
}

std::optional<PolicyTable> sub_imitate(SubImitateState& st,
                                       const std::vector<std::string>& cset,
                                       const PartialAssignment& c,
                                       unsigned depth) {
  const Ldag& g = st.g;
  Ldag gc = context_specific_dag(g, c);

  std::vector<std::string> rest;
  for (const auto& name : g.policy_scope()) {
    if (!c.binds(name)) rest.push_back(name);
  }
  {
    std::uint64_t cells = g.variable(g.action_index()).domain.size();
    for (const auto& name : rest) {
      cells *= g.variable(g.index_of(name)).domain.size();
      if (cells > st.opt.policy_cell_cap) {
        throw ResourceCapError("policy table exceeds the cell cap");
      }
    }
  }

  // (i) policy-scope backdoor within the context
  std::set<std::string> required(cset.begin(), cset.end());
  if (auto z = find_sep(gc, required)) {
    PolicyTable frag = PolicyTable::uniform(g, rest);
    for (std::size_t row = 0; row < frag.row_count(); ++row) {
      PartialAssignment a = frag.row_assignment(row);
      PartialAssignment given = c;
      for (const auto& name : *z) {
        if (!given.binds(name)) given.bind(name, a.at(name));
      }
      try {
        frag.rows[row] = st.obs.distribution_of(g.action_name(), given);
      } catch (const ZeroMassContext&) {
        frag.row_notes[row] = "zero-mass context; row filled uniform";
      }
    }
    BranchInfo info;
    info.context = c;
    info.route = "separator";
    info.separator = *z;
    std::lock_guard<std::mutex> lock(st.branch_mutex);
    st.branches->push_back(std::move(info));
    return frag;
  }

  // (ii) context-specific surrogates: the canonical minimal separator first,
  // then a bounded number of alternates before giving up on this route
  {
    auto space = surrogate_search_space(g, c);
    auto candidates = minimal_separator_candidates(g, space, 8);
    std::string last_reason;
    for (const auto& sep : candidates) {
      std::set<std::string> s = sep;
      for (const auto& name : space.required) s.erase(name);
      auto id = csi_identify(g, s, c, &st.obs);
      if (auto* formula = std::get_if<IdFormula>(&id)) {
        auto sys = build_equation_system(g, s, c, *formula, st.obs);
        if (st.opt.tolerance > 0) sys.tolerance = st.opt.tolerance;
        if (auto sol = solve_policy_equations(sys)) {
          BranchInfo info;
          info.context = c;
          info.route = "surrogate";
          info.surrogate = decl_ordered(g, s);
          info.formula = formula->provenance();
          info.residual = sol->residual;
          for (const auto& note : sys.notes) {
            info.detail += (info.detail.empty() ? "" : "; ") + note;
          }
          std::lock_guard<std::mutex> lock(st.branch_mutex);
          st.branches->push_back(std::move(info));
          return sol->fragment;
        }
        last_reason = "equation system infeasible";
      } else {
        last_reason = std::get<NotIdentifiedDiag>(id).reason;
      }
    }
    if (!candidates.empty()) {
      BranchInfo info;
      info.context = c;
      info.route = "surrogate-rejected";
      info.detail = last_reason;
      std::lock_guard<std::mutex> lock(st.branch_mutex);
      st.branches->push_back(std::move(info));
    }
  }

  // (iii) split on an unused context variable inside the policy scope
  std::vector<std::string> pool;
  {
    auto ctx = context_variables(g);
    auto scope = scope_set(g);
    for (const auto& name : ctx) {
      if (scope.count(name) && !c.binds(name)) pool.push_back(name);
    }
  }
  if (pool.empty()) {
    BranchInfo info;
    info.context = c;
    info.route = "fail";
    info.detail = "context variables exhausted";
    std::lock_guard<std::mutex> lock(st.branch_mutex);
    st.branches->push_back(std::move(info));
    return std::nullopt;
  }

  // pick the variable appearing in the most still-active labels
  std::string v = pool.front();
  {
    int best = -1;
    for (const auto& cand : pool) {
      int count = 0;
      for (const auto& e : gc.edges()) {
        for (const auto& label : e.labels) {
          if (label.binds(cand)) ++count;
        }
      }
      if (count > best) {
        best = count;
        v = cand;
      }
    }
  }

  {
    BranchInfo info;
    info.context = c;
    info.route = "split";
    info.split_variable = v;
    std::lock_guard<std::mutex> lock(st.branch_mutex);
    st.branches->push_back(std::move(info));
  }

  std::vector<std::string> next_cset = cset;
  next_cset.push_back(v);
  const auto& dom = g.variable(g.index_of(v)).domain;
  std::vector<std::optional<PolicyTable>> parts(dom.size());
  bool parallel = depth == 0 && st.opt.threads > 1;
  if (parallel) {
    std::vector<std::future<std::optional<PolicyTable>>> futures;
    for (const auto& value : dom) {
      PartialAssignment cv = c;
      cv.bind(v, value);
      futures.push_back(std::async(std::launch::async, [&st, next_cset, cv,
                                                        depth]() {
        return sub_imitate(st, next_cset, cv, depth + 1);
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) parts[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < dom.size(); ++i) {
      PartialAssignment cv = c;
      cv.bind(v, dom[i]);
      parts[i] = sub_imitate(st, next_cset, cv, depth + 1);
    }
  }
  return assemble_split(st, cset, c, v, std::move(parts));
}

}  // namespace

Imitate2Result imitate2(const Ldag& g, const JointTable& obs,
                        const Imitate2Options& opt) {
  Imitate2Result result;
  SubImitateState st{g, obs, opt, &result.branches, {}, 1e-8};
  if (opt.tolerance > 0) {
    st.tolerance_used = opt.tolerance;
  } else if (obs.estimated_from()) {
    double n = static_cast<double>(*obs.estimated_from());
    double cells = static_cast<double>(std::max<std::size_t>(obs.size(), 2));
    st.tolerance_used = std::max(1e-8, 3.0 * std::sqrt(std::log(cells) / n));
  }

  auto policy = sub_imitate(st, {}, {}, 0);
  result.tolerance_used = st.tolerance_used;
  if (policy) {
    result.verdict.decision = Decision::Imitable;
    result.verdict.policy = std::move(*policy);
  } else {
    result.verdict.decision = Decision::Unknown;
    result.verdict.notes.push_back(
        "search exhausted without certifying a policy (the procedure is "
        "sound, not complete)");
  }
  return result;
}

std::string serialize_imitate2_json(const Imitate2Result& r) {
  nlohmann::ordered_json j;
  j["decision"] = decision_name(r.verdict.decision);
  j["tolerance"] = r.tolerance_used;
  if (r.verdict.policy) {
    j["policy"] =
        nlohmann::ordered_json::parse(serialize_policy_json(*r.verdict.policy));
  }
  j["branches"] = nlohmann::ordered_json::array();
  for (const auto& b : r.branches) {
    nlohmann::ordered_json jb;
    jb["context"] = b.context.to_key();
    jb["route"] = b.route;
    if (!b.separator.empty()) jb["separator"] = b.separator;
    if (!b.surrogate.empty()) jb["surrogate"] = b.surrogate;
    if (!b.formula.empty()) jb["formula"] = b.formula;
    if (b.route == "surrogate") jb["residual"] = b.residual;
    if (!b.split_variable.empty()) jb["split_variable"] = b.split_variable;
    if (!b.detail.empty()) jb["detail"] = b.detail;
    j["branches"].push_back(std::move(jb));
  }
  if (!r.verdict.notes.empty()) j["notes"] = r.verdict.notes;
  return j.dump(2);
}

}  // namespace csimit
