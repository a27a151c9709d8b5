#include "csimit/identify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

// --- generic factor helpers over JointTable ---------------------------------

using Var = JointTable::Var;

// Sums out every scope variable not in `keep`.
JointTable factor_keep(const JointTable& f, const std::set<std::string>& keep) {
  std::vector<std::string> names;
  for (const auto& v : f.scope()) {
    if (keep.count(v.name)) names.push_back(v.name);
  }
  return f.marginal(names);
}

JointTable factor_product(const JointTable& a, const JointTable& b) {
  std::vector<Var> scope = a.scope();
  for (const auto& v : b.scope()) {
    bool present = false;
    for (const auto& w : scope) {
      if (w.name == v.name) {
        present = true;
        break;
      }
    }
    if (!present) scope.push_back(v);
  }
  std::sort(scope.begin(), scope.end(),
            [](const Var& l, const Var& r) { return l.name < r.name; });
  JointTable out = JointTable::zeros(scope);

  std::vector<int> a_pos, b_pos;
  for (const auto& v : out.scope()) {
    a_pos.push_back(a.var_position(v.name));
    b_pos.push_back(b.var_position(v.name));
  }
  std::vector<int> ad(a.scope().size()), bd(b.scope().size());
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    for (std::size_t k = 0; k < out.scope().size(); ++k) {
      int d = out.digit(cell, static_cast<int>(k));
      if (a_pos[k] >= 0) ad[a_pos[k]] = d;
      if (b_pos[k] >= 0) bd[b_pos[k]] = d;
    }
    out[cell] = a[a.flat_index(ad)] * b[b.flat_index(bd)];
  }
  return out;
}

// P(child | givens) computed from the factor p; cells with zero mass give 0.
JointTable factor_conditional(const JointTable& p, const std::string& child,
                              const std::set<std::string>& givens) {
  std::set<std::string> num_keep = givens;
  num_keep.insert(child);
  JointTable num = factor_keep(p, num_keep);
  JointTable den = factor_keep(p, givens);

  JointTable out = num;
  std::vector<int> den_pos;
  for (const auto& v : num.scope()) den_pos.push_back(den.var_position(v.name));
  std::vector<int> dd(den.scope().size());
  for (std::size_t cell = 0; cell < num.size(); ++cell) {
    for (std::size_t k = 0; k < num.scope().size(); ++k) {
      if (den_pos[k] >= 0) {
        dd[den_pos[k]] = num.digit(cell, static_cast<int>(k));
      }
    }
    double z = den[den.flat_index(dd)];
    out[cell] = z > 0.0 ? num[cell] / z : 0.0;
  }
  return out;
}

JointTable factor_slice_first(const JointTable& f,
                              const std::set<std::string>& drop) {
  JointTable cur = f;
  for (const auto& name : drop) {
    int pos = cur.var_position(name);
    if (pos < 0) continue;
    std::vector<Var> scope;
    for (const auto& v : cur.scope()) {
      if (v.name != name) scope.push_back(v);
    }
    JointTable nxt = JointTable::zeros(scope);
    std::vector<int> pos_map;
    for (const auto& v : nxt.scope()) pos_map.push_back(cur.var_position(v.name));
    std::vector<int> digits(cur.scope().size(), 0);
    for (std::size_t cell = 0; cell < nxt.size(); ++cell) {
      std::fill(digits.begin(), digits.end(), 0);
      for (std::size_t k = 0; k < nxt.scope().size(); ++k) {
        digits[pos_map[k]] = nxt.digit(cell, static_cast<int>(k));
      }
      nxt[cell] = cur[cur.flat_index(digits)];
    }
    cur = std::move(nxt);
  }
  return cur;
}

// --- graph helpers -----------------------------------------------------------

struct Ctx {
  const Admg* g;
  std::vector<std::vector<int>> dpar, dch, sib;
  std::vector<int> topo;  // global topological order (indices into vertices)
};

std::set<int> an_within(const Ctx& c, const std::set<int>& curr,
                        const std::set<int>& seed,
                        const std::set<int>& cut_into = {}) {
  // reflexive ancestors inside `curr`, ignoring edges into `cut_into`
  std::set<int> out;
  std::queue<int> q;
  for (int v : seed) {
    if (curr.count(v)) {
      out.insert(v);
      q.push(v);
    }
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (cut_into.count(v)) continue;
    for (int p : c.dpar[v]) {
      if (curr.count(p) && out.insert(p).second) q.push(p);
    }
  }
  return out;
}

std::vector<std::set<int>> districts(const Ctx& c, const std::set<int>& curr) {
  std::map<int, int> comp;
  int next = 0;
  for (int v : curr) {
    if (comp.count(v)) continue;
    std::queue<int> q;
    q.push(v);
    comp[v] = next;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : c.sib[u]) {
        if (curr.count(w) && !comp.count(w)) {
          comp[w] = next;
          q.push(w);
        }
      }
    }
    ++next;
  }
  std::vector<std::set<int>> out(next);
  for (auto [v, k] : comp) out[k].insert(v);
  return out;
}

std::string name_of(const Ctx& c, int v) { return c.g->vertices[v].name; }

// The ID recursion. Returns nullopt on a hedge. The factor's scope may
// include vertices outside `curr` (parameters fixed by an enclosing call).
std::optional<JointTable> idrec(const Ctx& c, std::set<int> curr,
                                std::set<int> y, std::set<int> x,
                                const JointTable& p) {
  // line 1
  if (x.empty()) {
    std::set<std::string> keep;
    for (const auto& v : p.scope()) keep.insert(v.name);
    for (int v : curr) {
      if (!y.count(v)) keep.erase(name_of(c, v));
    }
    return factor_keep(p, keep);
  }

  // line 2: restrict to ancestors of y
  auto an_y = an_within(c, curr, y);
  if (an_y != curr) {
    std::set<int> nx;
    for (int v : x) {
      if (an_y.count(v)) nx.insert(v);
    }
    std::set<std::string> keep;
    for (const auto& v : p.scope()) keep.insert(v.name);
    for (int v : curr) {
      if (!an_y.count(v)) keep.erase(name_of(c, v));
    }
    return idrec(c, an_y, y, nx, factor_keep(p, keep));
  }

  // line 3: absorb interventions forced by the mutilated graph
  {
    auto an_y_cut = an_within(c, curr, y, x);
    std::set<int> w;
    for (int v : curr) {
      if (!x.count(v) && !an_y_cut.count(v)) w.insert(v);
    }
    if (!w.empty()) {
      std::set<int> nx = x;
      nx.insert(w.begin(), w.end());
      return idrec(c, curr, y, nx, p);
    }
  }

  // line 4: factor across the districts of G[curr \ x]
  std::set<int> rem;
  for (int v : curr) {
    if (!x.count(v)) rem.insert(v);
  }
  auto ds = districts(c, rem);
  if (ds.size() > 1) {
    std::optional<JointTable> prod;
    for (const auto& s : ds) {
      std::set<int> rest;
      for (int v : curr) {
        if (!s.count(v)) rest.insert(v);
      }
      auto part = idrec(c, curr, s, rest, p);
      if (!part) return std::nullopt;
      prod = prod ? factor_product(*prod, *part) : *part;
    }
    std::set<std::string> keep;
    for (const auto& v : prod->scope()) keep.insert(v.name);
    for (int v : curr) {
      if (!y.count(v) && !x.count(v)) keep.erase(name_of(c, v));
    }
    return factor_keep(*prod, keep);
  }

  const std::set<int>& s = ds.front();
  auto full_ds = districts(c, curr);

  // line 5: hedge
  if (full_ds.size() == 1 && full_ds.front() == curr) return std::nullopt;

  // order curr by the global topological order
  std::vector<int> ordered;
  for (int v : c.topo) {
    if (curr.count(v)) ordered.push_back(v);
  }
  auto preds_of = [&](int v) {
    std::set<std::string> out;
    for (int u : ordered) {
      if (u == v) break;
      out.insert(name_of(c, u));
    }
    return out;
  };

  // line 6: s is a district of G[curr]
  for (const auto& d : full_ds) {
    if (d == s) {
      std::optional<JointTable> prod;
      for (int v : ordered) {
        if (!s.count(v)) continue;
        auto f = factor_conditional(p, name_of(c, v), preds_of(v));
        prod = prod ? factor_product(*prod, f) : f;
      }
      std::set<std::string> keep;
      for (const auto& v : prod->scope()) keep.insert(v.name);
      for (int v : s) {
        if (!y.count(v)) keep.erase(name_of(c, v));
      }
      return factor_keep(*prod, keep);
    }
  }

  // line 7: recurse inside the enclosing district
  for (const auto& d : full_ds) {
    bool contains = std::includes(d.begin(), d.end(), s.begin(), s.end());
    if (!contains) continue;
    std::optional<JointTable> q;
    for (int v : ordered) {
      if (!d.count(v)) continue;
      auto f = factor_conditional(p, name_of(c, v), preds_of(v));
      q = q ? factor_product(*q, f) : f;
    }
    std::set<int> nx;
    for (int v : x) {
      if (d.count(v)) nx.insert(v);
    }
    return idrec(c, d, y, nx, *q);
  }
  return std::nullopt;  // unreachable for well-formed inputs
}

}  // namespace

int Admg::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].name == name) return static_cast<int>(i);
  }
  throw InputError("ADMG: unknown vertex '" + name + "'");
}

Admg latent_project(const Ldag& g) {
  // Work over the full vertex set, then eliminate latent vertices one at a
  // time with the standard projection rewrites.
  int n = static_cast<int>(g.size());
  std::set<std::pair<int, int>> dir, bi;
  for (const auto& e : g.edges()) {
    dir.insert({g.index_of(e.from), g.index_of(e.to)});
  }
  auto add_bi = [&](int a, int b) {
    if (a == b) return;
    bi.insert({std::min(a, b), std::max(a, b)});
  };

  for (int l = 0; l < n; ++l) {
    if (g.variable(l).observed) continue;
    std::vector<int> par, ch;
    std::vector<int> sib;
    for (auto [a, b] : dir) {
      if (b == l) par.push_back(a);
      if (a == l) ch.push_back(b);
    }
    for (auto [a, b] : bi) {
      if (a == l) sib.push_back(b);
      if (b == l) sib.push_back(a);
    }
    for (int p : par) {
      for (int c : ch) {
        if (p != c) dir.insert({p, c});
      }
    }
    for (std::size_t i = 0; i < ch.size(); ++i) {
      for (std::size_t j = i + 1; j < ch.size(); ++j) add_bi(ch[i], ch[j]);
    }
    for (int s : sib) {
      for (int c : ch) add_bi(s, c);
    }
    std::erase_if(dir, [l](const auto& e) { return e.first == l || e.second == l; });
    std::erase_if(bi, [l](const auto& e) { return e.first == l || e.second == l; });
  }

  Admg a;
  std::vector<int> remap(n, -1);
  for (int v = 0; v < n; ++v) {
    if (g.variable(v).observed) {
      remap[v] = static_cast<int>(a.vertices.size());
      a.vertices.push_back({g.variable(v).name, g.variable(v).domain});
    }
  }
  for (auto [f, t] : dir) a.directed.push_back({remap[f], remap[t]});
  for (auto [f, t] : bi) a.bidirected.push_back({remap[f], remap[t]});
  std::sort(a.directed.begin(), a.directed.end());
  std::sort(a.bidirected.begin(), a.bidirected.end());
  return a;
}

std::optional<JointTable> identify_effect(const Admg& a, const JointTable& obs,
                                          const std::set<std::string>& targets,
                                          const std::string& x_var) {
  Ctx c;
  c.g = &a;
  int n = static_cast<int>(a.vertices.size());
  c.dpar.resize(n);
  c.dch.resize(n);
  c.sib.resize(n);
  for (auto [f, t] : a.directed) {
    c.dpar[t].push_back(f);
    c.dch[f].push_back(t);
  }
  for (auto [f, t] : a.bidirected) {
    c.sib[f].push_back(t);
    c.sib[t].push_back(f);
  }
  // Kahn order with min-index ties
  {
    std::vector<int> indeg(n, 0);
    for (auto [f, t] : a.directed) ++indeg[t];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < n; ++v) {
      if (indeg[v] == 0) ready.push(v);
    }
    while (!ready.empty()) {
      int v = ready.top();
      ready.pop();
      c.topo.push_back(v);
      for (int w : c.dch[v]) {
        if (--indeg[w] == 0) ready.push(w);
      }
    }
  }

  // obs restricted to the ADMG's vertex set, in a canonical order
  std::vector<std::string> names;
  for (const auto& v : a.vertices) names.push_back(v.name);
  JointTable p = obs.marginal(names);

  std::set<int> curr, y, x;
  for (int v = 0; v < n; ++v) curr.insert(v);
  for (const auto& t : targets) y.insert(a.index_of(t));
  x.insert(a.index_of(x_var));
  if (y.count(*x.begin())) {
    throw InputError("identify_effect: target contains the intervened variable");
  }

  auto f = idrec(c, curr, y, x, p);
  if (!f) return std::nullopt;

  // Anything outside targets ∪ {x} is a forced intervention from line 3 whose
  // value cannot matter; slice it away, then lay out as targets ∪ {x}.
  std::set<std::string> want = targets;
  want.insert(x_var);
  std::set<std::string> drop;
  for (const auto& v : f->scope()) {
    if (!want.count(v.name)) drop.insert(v.name);
  }
  JointTable sliced = factor_slice_first(*f, drop);

  std::vector<Var> final_scope;
  for (const auto& v : a.vertices) {
    if (want.count(v.name)) final_scope.push_back(v);
  }
  JointTable out = JointTable::zeros(final_scope);
  std::vector<int> pos;
  for (const auto& v : out.scope()) pos.push_back(sliced.var_position(v.name));
  std::vector<int> digits(sliced.scope().size(), 0);
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    std::fill(digits.begin(), digits.end(), 0);
    for (std::size_t k = 0; k < out.scope().size(); ++k) {
      if (pos[k] >= 0) digits[pos[k]] = out.digit(cell, static_cast<int>(k));
    }
    out[cell] = sliced[sliced.flat_index(digits)];
  }
  return out;
}

}  // namespace csimit
