#include "csimit/dsep.hpp"

#include <algorithm>
#include <queue>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

std::vector<char> mark_set(const Ldag& g, const std::set<std::string>& s) {
  std::vector<char> out(g.size(), 0);
  for (const auto& name : s) out[g.index_of(name)] = 1;
  return out;
}

std::set<std::string> names_of(const Ldag& g, const std::vector<char>& mark) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (mark[i]) out.insert(g.variable(static_cast<int>(i)).name);
  }
  return out;
}

std::vector<char> close_up(const Ldag& g, std::vector<char> mark) {
  std::queue<int> q;
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (mark[i]) q.push(static_cast<int>(i));
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int p : g.parents(v)) {
      if (!mark[p]) {
        mark[p] = 1;
        q.push(p);
      }
    }
  }
  return mark;
}

std::vector<char> close_down(const Ldag& g, std::vector<char> mark) {
  std::queue<int> q;
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (mark[i]) q.push(static_cast<int>(i));
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int c : g.children(v)) {
      if (!mark[c]) {
        mark[c] = 1;
        q.push(c);
      }
    }
  }
  return mark;
}

}  // namespace

std::set<std::string> ancestors(const Ldag& g, const std::set<std::string>& s) {
  return names_of(g, close_up(g, mark_set(g, s)));
}

std::set<std::string> descendants(const Ldag& g,
                                  const std::set<std::string>& s) {
  return names_of(g, close_down(g, mark_set(g, s)));
}

bool d_separated(const Ldag& g, const std::set<std::string>& x_set,
                 const std::set<std::string>& y_set,
                 const std::set<std::string>& z_set) {
  for (const auto& name : x_set) {
    if (y_set.count(name) || z_set.count(name)) {
      throw std::invalid_argument("d_separated: sets must be disjoint");
    }
  }
  for (const auto& name : y_set) {
    if (z_set.count(name)) {
      throw std::invalid_argument("d_separated: sets must be disjoint");
    }
  }
  auto x = mark_set(g, x_set);
  auto y = mark_set(g, y_set);
  auto z = mark_set(g, z_set);
  // vertices with a conditioned descendant open colliders
  auto opens = close_up(g, z);

  // Shachter's ball: state (vertex, arrived-from-child?)
  const int n = static_cast<int>(g.size());
  std::vector<char> seen_up(n, 0), seen_down(n, 0);
  std::queue<std::pair<int, bool>> q;  // bool: true = arrived from a child
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) q.push({static_cast<int>(i), true});
  }
  while (!q.empty()) {
    auto [v, from_child] = q.front();
    q.pop();
    auto& seen = from_child ? seen_up : seen_down;
    if (seen[v]) continue;
    seen[v] = 1;
    if (y[v]) return false;
    if (from_child) {
      if (!z[v]) {
        for (int p : g.parents(v)) q.push({p, true});
        for (int c : g.children(v)) q.push({c, false});
      }
    } else {
      if (!z[v]) {
        for (int c : g.children(v)) q.push({c, false});
      }
      if (opens[v]) {
        for (int p : g.parents(v)) q.push({p, true});
      }
    }
  }
  return true;
}

std::optional<std::vector<std::string>> find_min_sep(
    const Ldag& g, const std::string& x, const std::string& y,
    const std::set<std::string>& required,
    const std::set<std::string>& allowed) {
  if (x == y) throw std::invalid_argument("find_min_sep: x == y");
  for (const auto& name : required) {
    if (!allowed.count(name)) {
      throw std::invalid_argument("find_min_sep: required must be in allowed");
    }
  }
  if (allowed.count(x) || allowed.count(y)) {
    throw std::invalid_argument("find_min_sep: allowed contains an endpoint");
  }

  auto an_xy_req = ancestors(g, [&] {
    std::set<std::string> s = required;
    s.insert(x);
    s.insert(y);
    return s;
  }());

  std::set<std::string> z0;
  for (const auto& name : allowed) {
    if (an_xy_req.count(name)) z0.insert(name);
  }
  if (!d_separated(g, {x}, {y}, z0)) return std::nullopt;

  // Moral graph of the ancestral closure; a BFS stopping at candidate
  // separator vertices marks which of them are actually load-bearing.
  auto reach_boundary = [&](const std::string& source,
                            const std::set<std::string>& z) {
    std::set<std::string> anc_names = ancestors(g, [&] {
      std::set<std::string> s = z;
      s.insert(x);
      s.insert(y);
      return s;
    }());
    std::vector<char> in_anc(g.size(), 0);
    for (const auto& name : anc_names) in_anc[g.index_of(name)] = 1;

    std::vector<std::set<int>> adj(g.size());
    auto connect = [&](int a, int b) {
      adj[a].insert(b);
      adj[b].insert(a);
    };
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!in_anc[v]) continue;
      const auto& pa = g.parents(static_cast<int>(v));
      for (int p : pa) {
        if (in_anc[p]) connect(p, static_cast<int>(v));
      }
      for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = i + 1; j < pa.size(); ++j) {
          if (in_anc[pa[i]] && in_anc[pa[j]]) connect(pa[i], pa[j]);
        }
      }
    }

    std::vector<char> blocked(g.size(), 0);
    for (const auto& name : z) blocked[g.index_of(name)] = 1;
    std::set<std::string> hit;
    std::vector<char> visited(g.size(), 0);
    std::queue<int> q;
    int s = g.index_of(source);
    visited[s] = 1;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v]) {
        if (visited[w]) continue;
        visited[w] = 1;
        if (blocked[w]) {
          hit.insert(g.variable(w).name);
          continue;  // separator vertices absorb the walk
        }
        q.push(w);
      }
    }
    return hit;
  };

  auto pass = [&](const std::string& source, const std::set<std::string>& z) {
    auto hit = reach_boundary(source, z);
    std::set<std::string> out = required;
    for (const auto& name : z) {
      if (hit.count(name)) out.insert(name);
    }
    return out;
  };

  auto z1 = pass(x, z0);
  auto z2 = pass(y, z1);

  std::vector<std::string> out;
  for (const auto& v : g.variables()) {
    if (z2.count(v.name)) out.push_back(v.name);
  }
  return out;
}

}  // namespace csimit
