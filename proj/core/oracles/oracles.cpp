#include "csimit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"
#include "csimit/imitability.hpp"

namespace csimit::oracles {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool dsep_by_paths(const Ldag& g, const std::set<std::string>& x_set,
                   const std::set<std::string>& y_set,
                   const std::set<std::string>& z_set) {
  if (g.size() > 12) {
    throw ResourceCapError("dsep_by_paths: graph too large for enumeration");
  }
  const int n = static_cast<int>(g.size());
  std::vector<char> in_x(n, 0), in_y(n, 0), in_z(n, 0);
  for (const auto& name : x_set) in_x[g.index_of(name)] = 1;
  for (const auto& name : y_set) in_y[g.index_of(name)] = 1;
  for (const auto& name : z_set) in_z[g.index_of(name)] = 1;

  // undirected adjacency and parent lookup built straight off the edge list
  std::vector<std::set<int>> nbr(n);
  std::vector<std::set<int>> par(n);
  for (const auto& e : g.edges()) {
    int a = g.index_of(e.from);
    int b = g.index_of(e.to);
    nbr[a].insert(b);
    nbr[b].insert(a);
    par[b].insert(a);
  }

  // has some z among the reflexive descendants?
  std::vector<char> desc_in_z(n, 0);
  {
    std::function<bool(int, std::vector<char>&)> dive =
        [&](int v, std::vector<char>& visiting) -> bool {
      if (in_z[v]) return true;
      if (visiting[v]) return false;
      visiting[v] = 1;
      for (const auto& e : g.edges()) {
        int a = g.index_of(e.from);
        if (a == v && dive(g.index_of(e.to), visiting)) return true;
      }
      return false;
    };
    for (int v = 0; v < n; ++v) {
      std::vector<char> visiting(n, 0);
      desc_in_z[v] = dive(v, visiting) ? 1 : 0;
    }
  }

  std::vector<int> path;
  std::vector<char> on_path(n, 0);
  bool connected = false;

  std::function<void(int)> walk = [&](int v) {
    if (connected) return;
    if (in_y[v] && path.size() >= 1) {
      // blocking check over interior vertices
      bool blocked = false;
      std::vector<int> full = path;
      full.push_back(v);
      for (std::size_t i = 1; i + 1 < full.size(); ++i) {
        int a = full[i - 1], b = full[i], c = full[i + 1];
        bool collider = par[b].count(a) > 0 && par[b].count(c) > 0;
        if (collider) {
          if (!desc_in_z[b]) {
            blocked = true;
            break;
          }
        } else if (in_z[b]) {
          blocked = true;
          break;
        }
      }
      if (!blocked) connected = true;
      return;
    }
    for (int w : nbr[v]) {
      if (on_path[w] || connected) continue;
      if (in_x[w]) continue;
      path.push_back(v);
      on_path[v] = 1;
      walk(w);
      path.pop_back();
      on_path[v] = 0;
    }
  };

  for (int v = 0; v < n && !connected; ++v) {
    if (in_x[v]) {
      on_path[v] = 1;
      walk(v);
      on_path[v] = 0;
    }
  }
  return !connected;
}

namespace {

// Independent joint enumeration: odometer over full assignments, CPT rows
// read off directly. No JointTable, no engine code.
struct RawModel {
  const DiscreteScm& m;
  std::vector<std::vector<int>> parent_indices;
  std::vector<int> dom_sizes;

  explicit RawModel(const DiscreteScm& model) : m(model) {
    const Ldag& g = m.graph();
    for (std::size_t v = 0; v < g.size(); ++v) {
      dom_sizes.push_back(
          static_cast<int>(g.variable(static_cast<int>(v)).domain.size()));
      std::vector<int> idx;
      for (const auto& p : m.cpt(static_cast<int>(v)).parents) {
        idx.push_back(g.index_of(p));
      }
      parent_indices.push_back(std::move(idx));
    }
  }

  double cpt_value(int v, const std::vector<int>& assign) const {
    std::size_t row = 0;
    for (int p : parent_indices[v]) {
      row = row * static_cast<std::size_t>(dom_sizes[p]) +
            static_cast<std::size_t>(assign[p]);
    }
    return m.cpt(v).rows[row][assign[v]];
  }

  template <typename WeightFn, typename Sink>
  void enumerate(WeightFn&& weight, Sink&& sink) const {
    const int n = static_cast<int>(dom_sizes.size());
    std::vector<int> assign(n, 0);
    while (true) {
      sink(assign, weight(assign));
      int k = n - 1;
      for (; k >= 0; --k) {
        if (++assign[k] < dom_sizes[k]) break;
        assign[k] = 0;
      }
      if (k < 0) break;
    }
  }
};

std::vector<double> reward_dist_observational(const DiscreteScm& m) {
  RawModel raw(m);
  const Ldag& g = m.graph();
  const int n = static_cast<int>(g.size());
  int yi = g.reward_index();
  std::vector<double> out(g.variable(yi).domain.size(), 0.0);
  raw.enumerate(
      [&](const std::vector<int>& a) {
        double p = 1.0;
        for (int v = 0; v < n; ++v) p *= raw.cpt_value(v, a);
        return p;
      },
      [&](const std::vector<int>& a, double p) { out[a[yi]] += p; });
  return out;
}

std::vector<double> reward_dist_under_policy(const DiscreteScm& m,
                                             const PolicyTable& pi) {
  RawModel raw(m);
  const Ldag& g = m.graph();
  const int n = static_cast<int>(g.size());
  int yi = g.reward_index();
  int xi = g.action_index();
  std::vector<int> scope_idx;
  for (const auto& v : pi.scope) scope_idx.push_back(g.index_of(v.name));
  std::vector<double> out(g.variable(yi).domain.size(), 0.0);
  raw.enumerate(
      [&](const std::vector<int>& a) {
        double p = 1.0;
        for (int v = 0; v < n; ++v) {
          if (v == xi) continue;
          p *= raw.cpt_value(v, a);
        }
        std::size_t row = 0;
        for (std::size_t k = 0; k < scope_idx.size(); ++k) {
          row = row * pi.scope[k].domain.size() +
                static_cast<std::size_t>(a[scope_idx[k]]);
        }
        return p * pi.rows[row][a[xi]];
      },
      [&](const std::vector<int>& a, double p) { out[a[yi]] += p; });
  return out;
}

}  // namespace

double policy_gap(const DiscreteScm& m, const PolicyTable& pi) {
  auto base = reward_dist_observational(m);
  auto alt = reward_dist_under_policy(m, pi);
  double gap = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    gap = std::max(gap, std::abs(base[i] - alt[i]));
  }
  return gap;
}

bool verify_policy(const DiscreteScm& m, const PolicyTable& pi, double tol) {
  return policy_gap(m, pi) <= tol;
}

namespace {

enum class ScmFlavor { Random, Parity, XorConfound };

// CSI-aware random CPTs (independent re-implementation: identical rows are
// forced by overwriting with the first row of each label-equivalence group).
//
// XorConfound is the classic hard family: latent vertices are fair coins
// that ignore their parents, the action copies the parity of its latent
// parents, and the reward is the parity of its latent parents and the
// action, so no policy blind to the latents can match the expert.
DiscreteScm oracle_random_scm(const Ldag& g, std::mt19937_64& rng,
                              ScmFlavor flavor) {
  std::vector<Cpt> cpts;
  for (const auto& v : g.variables()) {
    Cpt cpt;
    cpt.child = v.name;
    cpt.parents = g.parent_names(v.name);
    std::size_t nrows = 1;
    for (const auto& p : cpt.parents) {
      nrows *= g.variable(g.index_of(p)).domain.size();
    }
    const std::size_t k = v.domain.size();
    const bool is_action = v.role == Role::Action;
    const bool is_reward = v.role == Role::Reward;

    std::vector<int> latent_parent;  // positions within the parent list
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
      if (!g.variable(g.index_of(cpt.parents[i])).observed) {
        latent_parent.push_back(static_cast<int>(i));
      }
    }
    int action_parent = -1;
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
      if (cpt.parents[i] == g.action_name()) {
        action_parent = static_cast<int>(i);
      }
    }

    for (std::size_t r = 0; r < nrows; ++r) {
      std::vector<int> digits(cpt.parents.size());
      {
        std::size_t rem = r;
        for (int i = static_cast<int>(cpt.parents.size()) - 1; i >= 0; --i) {
          const auto& dom = g.variable(g.index_of(cpt.parents[i])).domain;
          digits[i] = static_cast<int>(rem % dom.size());
          rem /= dom.size();
        }
      }
      std::vector<double> row(k);
      bool patterned = false;
      if (flavor == ScmFlavor::Parity && !cpt.parents.empty()) {
        int parity = 0;
        for (int d : digits) parity ^= d & 1;
        for (std::size_t j = 0; j < k; ++j) {
          row[j] = (static_cast<int>(j % 2) == parity) ? 0.98 : 0.02;
        }
        patterned = true;
      } else if (flavor == ScmFlavor::XorConfound) {
        // action copies its latent parents' parity; mediators and the reward
        // pass the confounded signal along; everything else is noise
        auto parity_row = [&](int parity) {
          for (std::size_t j = 0; j < k; ++j) {
            row[j] = (static_cast<int>(j % 2) == parity) ? 0.99 : 0.01;
          }
          patterned = true;
        };
        int parity = 0;
        for (int i : latent_parent) parity ^= digits[i] & 1;
        if (action_parent >= 0) parity ^= digits[action_parent] & 1;
        if (is_action && !latent_parent.empty()) {
          int own = 0;
          for (int i : latent_parent) own ^= digits[i] & 1;
          parity_row(own);
        } else if (is_reward) {
          if (latent_parent.empty() && action_parent < 0) {
            int all = 0;
            for (int d : digits) all ^= d & 1;
            if (!digits.empty()) parity_row(all);
          } else {
            parity_row(parity);
          }
        } else if (v.observed && !is_action &&
                   (!latent_parent.empty() || action_parent >= 0)) {
          parity_row(parity);  // mediator
        }
        if (!patterned) {
          row.assign(k, 1.0 / static_cast<double>(k));
          patterned = true;
        }
      }
      if (patterned) {
        double sum = 0.0;
        for (double x : row) sum += x;
        for (double& x : row) x /= sum;
      } else {
        double sum = 0.0;
        for (auto& x : row) {
          double u = uniform01(rng);
          x = 0.05 - std::log(u <= 0 ? 0x1.0p-53 : u);
          sum += x;
        }
        for (auto& x : row) x /= sum;
      }
      cpt.rows.push_back(std::move(row));
    }

    // enforce the labels: copy the group leader's row
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
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& e : g.edges()) {
        if (e.to != v.name) continue;
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
            if (!fresh && cpt.rows[r] != cpt.rows[it->second]) {
              cpt.rows[r] = cpt.rows[it->second];
              changed = true;
            }
          }
        }
      }
    }
    cpts.push_back(std::move(cpt));
  }
  return DiscreteScm::create(g, std::move(cpts));
}

std::vector<PolicyTable> policy_grid(const Ldag& g, int steps) {
  // binary actions only; rows walk a probability grid
  std::vector<PolicyTable> out;
  const auto& xdom = g.variable(g.action_index()).domain;
  if (xdom.size() != 2) return out;
  PolicyTable base = PolicyTable::uniform(g, g.policy_scope());
  std::size_t rows = base.row_count();
  if (rows > 4) return out;  // grid explodes past this; rely on candidates
  std::size_t total = 1;
  for (std::size_t r = 0; r < rows; ++r) total *= (steps + 1);
  for (std::size_t code = 0; code < total; ++code) {
    PolicyTable p = base;
    std::size_t rem = code;
    for (std::size_t r = 0; r < rows; ++r) {
      double q = static_cast<double>(rem % (steps + 1)) / steps;
      rem /= (steps + 1);
      p.rows[r] = {1.0 - q, q};
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

AdversarialResult adversarial_scm_search(const Ldag& g, int trials,
                                         std::uint64_t seed) {
  AdversarialResult result;
  result.trials = static_cast<std::uint64_t>(trials);
  std::mt19937_64 rng(seed);

  auto grid = policy_grid(g, 8);
  auto backdoor = find_sep(g);

  for (int t = 0; t < trials; ++t) {
    ScmFlavor flavor = ScmFlavor::Random;
    if (t % 3 == 0) flavor = ScmFlavor::XorConfound;
    if (t % 3 == 1) flavor = ScmFlavor::Parity;
    DiscreteScm m = oracle_random_scm(g, rng, flavor);

    double best_for_model = std::numeric_limits<double>::infinity();
    if (backdoor) {
      // the backdoor policy P(x | Z) computed with the oracle enumerator
      RawModel raw(m);
      const int n = static_cast<int>(g.size());
      int xi = g.action_index();
      PolicyTable p = PolicyTable::uniform(g, *backdoor);
      std::vector<int> scope_idx;
      for (const auto& v : p.scope) scope_idx.push_back(g.index_of(v.name));
      std::vector<std::vector<double>> acc(p.row_count());
      for (auto& row : acc) {
        row.assign(g.variable(xi).domain.size(), 0.0);
      }
      raw.enumerate(
          [&](const std::vector<int>& a) {
            double w = 1.0;
            for (int v = 0; v < n; ++v) w *= raw.cpt_value(v, a);
            return w;
          },
          [&](const std::vector<int>& a, double w) {
            std::size_t row = 0;
            for (std::size_t k = 0; k < scope_idx.size(); ++k) {
              row = row * p.scope[k].domain.size() +
                    static_cast<std::size_t>(a[scope_idx[k]]);
            }
            acc[row][a[xi]] += w;
          });
      for (std::size_t r = 0; r < acc.size(); ++r) {
        double z = 0.0;
        for (double x : acc[r]) z += x;
        if (z > 0) {
          for (std::size_t j = 0; j < acc[r].size(); ++j) {
            p.rows[r][j] = acc[r][j] / z;
          }
        }
      }
      best_for_model = std::min(best_for_model, policy_gap(m, p));
    }
    for (const auto& p : grid) {
      best_for_model = std::min(best_for_model, policy_gap(m, p));
      if (best_for_model <= 1e-12) break;
    }
    if (grid.empty() && !backdoor) {
      best_for_model = policy_gap(m, PolicyTable::uniform(g, {}));
    }

    if (std::getenv("CSIMIT_ADV_DEBUG")) {
      std::fprintf(stderr, "trial %d flavor %d gap %g\n", t,
                   static_cast<int>(flavor), best_for_model);
    }
    if (best_for_model > result.best_gap) {
      result.best_gap = best_for_model;
      result.best_trial = static_cast<std::uint64_t>(t);
      result.best_model = m;
    }
  }
  return result;
}

bool exhaustive_sat(const CnfFormula& f) {
  f.validate();
  if (f.num_vars > 20) {
    throw ResourceCapError("exhaustive_sat: more than 20 variables");
  }
  const std::uint64_t total = 1ull << f.num_vars;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    bool ok = true;
    for (const auto& clause : f.clauses) {
      bool sat = false;
      for (int lit : clause) {
        bool value = (mask >> (std::abs(lit) - 1)) & 1;
        if ((lit > 0 && value) || (lit < 0 && !value)) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

namespace {

Ldag random_plain_dag(std::mt19937_64& rng, int n, double edge_prob) {
  std::vector<VariableDecl> decls;
  for (int v = 0; v < n; ++v) {
    Role role = Role::Plain;
    if (v == 0) role = Role::Action;
    if (v == n - 1) role = Role::Reward;
    decls.push_back({"V" + std::to_string(v), {"0", "1"}, true, role});
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  std::vector<LabeledEdge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform01(rng) < edge_prob) {
        edges.push_back({"V" + std::to_string(order[i]),
                         "V" + std::to_string(order[j]),
                         {}});
      }
    }
  }
  return Ldag::create(std::move(decls), std::move(edges), {},
                      Ldag::Validation::Structural);
}

}  // namespace

OracleReport run_dsep_suite(int graphs, int queries_per_graph,
                            std::uint64_t seed) {
  OracleReport report;
  std::mt19937_64 rng(seed);
  for (int gi = 0; gi < graphs; ++gi) {
    int n = 4 + static_cast<int>(rng() % 7);  // 4..10
    Ldag g = random_plain_dag(rng, n, 0.3);
    for (int q = 0; q < queries_per_graph; ++q) {
      // random disjoint x, y, z
      std::vector<int> verts(n);
      for (int i = 0; i < n; ++i) verts[i] = i;
      for (std::size_t i = verts.size(); i > 1; --i) {
        std::swap(verts[i - 1], verts[rng() % i]);
      }
      std::set<std::string> xs{g.variable(verts[0]).name};
      std::set<std::string> ys{g.variable(verts[1]).name};
      std::set<std::string> zs;
      int zn = static_cast<int>(rng() % (n - 1));
      for (int i = 0; i < zn && 2 + i < n; ++i) {
        zs.insert(g.variable(verts[2 + i]).name);
      }
      ++report.checked;
      bool fast = d_separated(g, xs, ys, zs);
      bool slow = dsep_by_paths(g, xs, ys, zs);
      if (fast != slow) {
        std::ostringstream inst;
        inst << "graph#" << gi << " x=" << *xs.begin() << " y=" << *ys.begin()
             << " |z|=" << zs.size();
        report.mismatches.push_back({inst.str(), slow ? "true" : "false",
                                     fast ? "true" : "false"});
      }
    }
  }
  return report;
}

OracleReport run_policy_suite(int trials, std::uint64_t seed) {
  OracleReport report;
  std::mt19937_64 rng(seed);
  CensusConfig cfg;
  cfg.n = 7;
  cfg.max_degree = 4;
  cfg.num_context_vars = 2;
  for (int t = 0; t < trials; ++t) {
    Ldag g = random_ldag(cfg, seed * 1000003ull + t);
    DiscreteScm m = random_scm_for_ldag(g, seed * 7919ull + t);
    PolicyTable p = PolicyTable::uniform(g, g.policy_scope());
    for (auto& row : p.rows) {
      double sum = 0.0;
      for (auto& v : row) {
        v = 0.05 + uniform01(rng);
        sum += v;
      }
      for (auto& v : row) v /= sum;
    }
    ++report.checked;
    // independent enumerator vs the production engine
    auto oracle_dist = reward_dist_under_policy(m, p);
    JointTable engine =
        interventional(m, p).marginal({g.reward_name()});
    double gap = 0.0;
    for (std::size_t i = 0; i < oracle_dist.size(); ++i) {
      gap = std::max(gap, std::abs(oracle_dist[i] - engine[i]));
    }
    if (gap > 1e-12) {
      report.mismatches.push_back(
          {"trial#" + std::to_string(t), "gap<=1e-12",
           "gap=" + std::to_string(gap)});
    }
  }
  return report;
}

OracleReport run_sat_suite(int instances, std::uint64_t seed) {
  OracleReport report;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    int k = 4 + static_cast<int>(rng() % 5);   // 4..8 variables
    int m = 4 + static_cast<int>(rng() % 9);   // 4..12 clauses
    CnfFormula f;
    f.num_vars = k;
    for (int ci = 0; ci < m; ++ci) {
      std::vector<int> vars(k);
      for (int v = 0; v < k; ++v) vars[v] = v + 1;
      for (std::size_t j = vars.size(); j > 1; --j) {
        std::swap(vars[j - 1], vars[rng() % j]);
      }
      std::array<int, 3> clause{};
      for (int j = 0; j < 3; ++j) {
        clause[j] = (rng() & 1) ? vars[j] : -vars[j];
      }
      f.clauses.push_back(clause);
    }
    ++report.checked;
    bool sat = exhaustive_sat(f);
    auto verdict = imitate1(sat_to_ldag(f));
    bool imitable = verdict.decision == Decision::Imitable;
    if (imitable != !sat) {
      report.mismatches.push_back(
          {"instance#" + std::to_string(i), sat ? "not imitable" : "imitable",
           decision_name(verdict.decision)});
    }
  }
  return report;
}

std::string OracleReport::to_json() const {
  nlohmann::ordered_json j;
  j["checked"] = checked;
  j["pass"] = pass();
  j["mismatches"] = nlohmann::ordered_json::array();
  for (const auto& m : mismatches) {
    j["mismatches"].push_back(
        {{"instance", m.instance}, {"expected", m.expected}, {"got", m.got}});
  }
  return j.dump(2);
}

}  // namespace csimit::oracles
