#include "csimit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  // rejection sampling keeps the draw unbiased and portable
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

template <typename T>
void shuffle_inplace(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

std::vector<double> dirichlet_row(std::mt19937_64& rng, std::size_t k) {
  std::vector<double> row(k);
  double sum = 0.0;
  for (auto& v : row) {
    double u = uniform01(rng);
    if (u <= 0.0) u = 0x1.0p-53;
    v = -std::log(u);
    sum += v;
  }
  for (auto& v : row) v /= sum;
  return row;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Ldag try_random_ldag(const CensusConfig& cfg, std::mt19937_64& rng) {
  const int n = cfg.n;
  if (n < 4) throw InputError("random_ldag: need at least 4 vertices");
  const int cap = cfg.degree_cap();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle_inplace(order, rng);
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (rank[i] < rank[j]) pairs.push_back({i, j});
    }
  }
  shuffle_inplace(pairs, rng);

  // greedy fill toward the cap; half the maximum cap-respecting edge count
  // keeps instances varied while leaving room for latent confounding
  const std::size_t target_edges =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(cap) / 2;
  std::vector<int> degree(n, 0);
  std::vector<std::vector<int>> children(n), parents(n);
  std::size_t added = 0;
  for (const auto& [a, b] : pairs) {
    if (added >= target_edges) break;
    if (degree[a] >= cap || degree[b] >= cap) continue;
    children[a].push_back(b);
    parents[b].push_back(a);
    ++degree[a];
    ++degree[b];
    ++added;
  }

  // descendants closure for the action/reward placement
  auto descendants_of = [&](int v) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int c : children[u]) {
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
      }
    }
    return seen;
  };

  std::vector<int> with_desc;
  for (int v = 0; v < n; ++v) {
    auto seen = descendants_of(v);
    if (std::count(seen.begin(), seen.end(), 1) > 1) with_desc.push_back(v);
  }
  if (with_desc.empty()) throw InputError("no vertex with descendants");
  int action = with_desc[uniform_below(rng, with_desc.size())];
  auto de_x = descendants_of(action);
  std::vector<int> reward_cands;
  for (int v = 0; v < n; ++v) {
    if (v != action && de_x[v]) reward_cands.push_back(v);
  }
  int reward = reward_cands[uniform_below(rng, reward_cands.size())];

  std::vector<bool> observed(n, true);
  for (int v = 0; v < n; ++v) {
    if (v == action) continue;
    if (v == reward) {
      observed[v] = false;  // latent reward, as in the standing setup
      continue;
    }
    observed[v] = uniform01(rng) >= cfg.latent_prob;
  }

  // context variables: observed roots (parents only among themselves holds
  // trivially); promote observed vertices to roots when there are too few
  std::vector<int> ctx;
  {
    auto is_root = [&](int v) { return parents[v].empty(); };
    std::vector<int> with_children, childless;
    for (int v = 0; v < n; ++v) {
      if (v == action || v == reward || !observed[v] || !is_root(v)) continue;
      (children[v].empty() ? childless : with_children).push_back(v);
    }
    shuffle_inplace(with_children, rng);
    // heavier roots give the labels more edges to act on
    std::stable_sort(with_children.begin(), with_children.end(),
                     [&](int a, int b) {
                       return children[a].size() > children[b].size();
                     });
    shuffle_inplace(childless, rng);
    for (int v : with_children) {
      if (static_cast<int>(ctx.size()) < cfg.num_context_vars) ctx.push_back(v);
    }
    for (int v : childless) {
      if (static_cast<int>(ctx.size()) < cfg.num_context_vars) ctx.push_back(v);
    }
    if (static_cast<int>(ctx.size()) < cfg.num_context_vars) {
      std::vector<int> promotable;
      for (int v = 0; v < n; ++v) {
        if (v == action || v == reward || !observed[v] || is_root(v)) continue;
        promotable.push_back(v);
      }
      shuffle_inplace(promotable, rng);
      for (int v : promotable) {
        if (static_cast<int>(ctx.size()) >= cfg.num_context_vars) break;
        for (int p : parents[v]) {
          auto& ch = children[p];
          ch.erase(std::remove(ch.begin(), ch.end(), v), ch.end());
        }
        parents[v].clear();
        ctx.push_back(v);
      }
      // promotion rewires reachability; the scope below must see the result
      de_x = descendants_of(action);
      if (!de_x[reward]) {
        throw InputError("promotion disconnected the reward");
      }
    }
  }
  std::vector<char> is_ctx(n, 0);
  for (int v : ctx) is_ctx[v] = 1;

  auto var_name = [](int v) { return "V" + std::to_string(v); };

  std::vector<VariableDecl> decls;
  for (int v = 0; v < n; ++v) {
    Role role = Role::Plain;
    if (v == action) role = Role::Action;
    if (v == reward) role = Role::Reward;
    decls.push_back({var_name(v), {"0", "1"}, observed[v], role});
  }

  std::vector<LabeledEdge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b : children[a]) {
      LabeledEdge e{var_name(a), var_name(b), {}};
      std::vector<int> ctx_parents;
      for (int p : parents[b]) {
        if (p != a && is_ctx[p]) ctx_parents.push_back(p);
      }
      if (!ctx_parents.empty()) {
        // bind one context parent; each of its realizations becomes a label
        // independently, so edges can be absent in several contexts
        int bound = ctx_parents[uniform_below(rng, ctx_parents.size())];
        for (const auto& value : {"0", "1"}) {
          if (uniform01(rng) < cfg.label_prob) {
            PartialAssignment label;
            label.bind(var_name(bound), value);
            e.labels.push_back(std::move(label));
          }
        }
      }
      edges.push_back(std::move(e));
    }
  }

  std::vector<std::string> scope;
  for (int v = 0; v < n; ++v) {
    if (observed[v] && !de_x[v]) scope.push_back(var_name(v));
  }

  return Ldag::create(std::move(decls), std::move(edges), std::move(scope));
}

}  // namespace

int CensusConfig::degree_cap() const {
  if (max_degree > 0) return max_degree;
  return std::max(2, n / 10);
}

Ldag random_ldag(const CensusConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return try_random_ldag(cfg, rng);
    } catch (const InputError&) {
      // regenerate from the evolved stream; the attempt count is bounded
    }
  }
  throw InputError("random_ldag: could not satisfy the constraints");
}

DiscreteScm random_scm_for_ldag(const Ldag& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Cpt> cpts;
  for (const auto& v : g.variables()) {
    Cpt cpt;
    cpt.child = v.name;
    cpt.parents = g.parent_names(v.name);

    std::vector<std::size_t> dom_sizes;
    std::size_t nrows = 1;
    for (const auto& p : cpt.parents) {
      dom_sizes.push_back(g.variable(g.index_of(p)).domain.size());
      nrows *= dom_sizes.back();
    }
    auto row_assignment = [&](std::size_t row) {
      PartialAssignment a;
      std::size_t rem = row;
      for (int i = static_cast<int>(cpt.parents.size()) - 1; i >= 0; --i) {
        const auto& dom = g.variable(g.index_of(cpt.parents[i])).domain;
        a.bind(cpt.parents[i], dom[rem % dom.size()]);
        rem /= dom.size();
      }
      return a;
    };

    // tie together rows that a label forces to be equal
    UnionFind uf(nrows);
    for (const auto& e : g.edges()) {
      if (e.to != v.name || e.labels.empty()) continue;
      for (const auto& label : e.labels) {
        std::map<std::string, std::size_t> leader;
        for (std::size_t r = 0; r < nrows; ++r) {
          PartialAssignment a = row_assignment(r);
          if (!a.extends(label)) continue;
          PartialAssignment key;
          for (const auto& [var, value] : a.bindings()) {
            if (var != e.from) key.bind(var, value);
          }
          auto [it, fresh] = leader.try_emplace(key.to_key(), r);
          if (!fresh) {
            uf.unite(static_cast<int>(it->second), static_cast<int>(r));
          }
        }
      }
    }

    cpt.rows.resize(nrows);
    std::map<int, std::vector<double>> drawn;
    for (std::size_t r = 0; r < nrows; ++r) {
      int root = uf.find(static_cast<int>(r));
      auto it = drawn.find(root);
      if (it == drawn.end()) {
        it = drawn.emplace(root, dirichlet_row(rng, v.domain.size())).first;
      }
      cpt.rows[r] = it->second;
    }
    cpts.push_back(std::move(cpt));
  }
  return DiscreteScm::create(g, std::move(cpts));
}

void CnfFormula::validate() const {
  if (num_vars < 1) throw InputError("CNF: no variables");
  for (const auto& clause : clauses) {
    std::set<int> vars;
    for (int lit : clause) {
      if (lit == 0 || std::abs(lit) > num_vars) {
        throw InputError("CNF: literal out of range");
      }
      vars.insert(std::abs(lit));
    }
    if (vars.size() != 3) {
      throw InputError("CNF: clauses need 3 distinct variables");
    }
  }
}

CnfFormula CnfFormula::parse_dimacs(const std::string& text) {
  CnfFormula f;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  std::vector<int> lits;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, cnf;
      int nv = 0, nc = 0;
      ls >> p >> cnf >> nv >> nc;
      if (cnf != "cnf") throw InputError("DIMACS: expected 'p cnf'");
      f.num_vars = nv;
      header = true;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (lits.size() != 3) {
          throw InputError("DIMACS: expected 3-literal clauses");
        }
        f.clauses.push_back({lits[0], lits[1], lits[2]});
        lits.clear();
      } else {
        lits.push_back(lit);
      }
    }
  }
  if (!header) throw InputError("DIMACS: missing 'p cnf' header");
  if (!lits.empty()) throw InputError("DIMACS: trailing unterminated clause");
  f.validate();
  return f;
}

std::string CnfFormula::to_dimacs() const {
  std::ostringstream os;
  os << "p cnf " << num_vars << ' ' << clauses.size() << '\n';
  for (const auto& clause : clauses) {
    os << clause[0] << ' ' << clause[1] << ' ' << clause[2] << " 0\n";
  }
  return os.str();
}

Ldag sat_to_ldag(const CnfFormula& f) {
  f.validate();
  const int k = f.num_vars;
  const int m = static_cast<int>(f.clauses.size());

  std::vector<VariableDecl> decls;
  decls.push_back({"I_X", {"0", "1"}, true, Role::Plain});
  for (int j = 1; j <= k; ++j) {
    decls.push_back({"W" + std::to_string(j), {"0", "1"}, false, Role::Plain});
  }
  for (int i = 0; i <= m; ++i) {
    decls.push_back({"S" + std::to_string(i), {"0", "1"}, false, Role::Plain});
  }
  decls.push_back({"X", {"0", "1"}, true, Role::Action});
  decls.push_back({"Y", {"0", "1"}, true, Role::Reward});

  std::vector<LabeledEdge> edges;
  edges.push_back({"I_X", "X", {}});
  {
    PartialAssignment intervened;
    intervened.bind("I_X", "1");
    edges.push_back({"S0", "X", {intervened}});
  }
  for (int i = 1; i <= m; ++i) {
    const auto& clause = f.clauses[i - 1];
    // the single assignment of the clause's variables that falsifies it
    PartialAssignment falsifier;
    for (int lit : clause) {
      falsifier.bind("W" + std::to_string(std::abs(lit)),
                     lit > 0 ? "0" : "1");
    }
    edges.push_back({"S" + std::to_string(i - 1), "S" + std::to_string(i),
                     {falsifier}});
    std::set<int> seen;
    for (int lit : clause) {
      if (seen.insert(std::abs(lit)).second) {
        edges.push_back(
            {"W" + std::to_string(std::abs(lit)), "S" + std::to_string(i), {}});
      }
    }
  }
  edges.push_back({"S" + std::to_string(m), "Y", {}});
  edges.push_back({"X", "Y", {}});

  return Ldag::create(std::move(decls), std::move(edges), {"I_X"});
}

}  // namespace csimit
