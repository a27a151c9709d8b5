#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "csimit/generators.hpp"
#include "csimit/identify.hpp"
#include "csimit/scenarios.hpp"
#include "csimit/scm.hpp"

using namespace csimit;

namespace {

bool has_directed(const Admg& a, const std::string& f, const std::string& t) {
  auto fi = a.index_of(f), ti = a.index_of(t);
  for (auto [x, y] : a.directed) {
    if (x == fi && y == ti) return true;
  }
  return false;
}

bool has_bidirected(const Admg& a, const std::string& f, const std::string& t) {
  auto fi = a.index_of(f), ti = a.index_of(t);
  for (auto [x, y] : a.bidirected) {
    if ((x == fi && y == ti) || (x == ti && y == fi)) return true;
  }
  return false;
}

// compares the identified effect against the exact engine on a random model
void check_identified_effect(const Ldag& g, const std::set<std::string>& s,
                             std::uint64_t seed, double tol = 1e-11) {
  DiscreteScm m = random_scm_for_ldag(g, seed);
  JointTable obs = joint_distribution(m).marginal(g.observed_names());
  Admg a = latent_project(g);
  auto f = identify_effect(a, obs, s, g.action_name());
  REQUIRE(f.has_value());
  std::vector<std::string> s_order;
  for (const auto& v : f->scope()) {
    if (s.count(v.name)) s_order.push_back(v.name);
  }
  for (const auto& xv : g.variable(g.action_index()).domain) {
    PartialAssignment dox;
    dox.bind(g.action_name(), xv);
    JointTable truth = interventional(m, dox).marginal(s_order);
    for (std::size_t cell = 0; cell < truth.size(); ++cell) {
      PartialAssignment sa = truth.assignment_at(cell);
      PartialAssignment query = sa;
      query.bind(g.action_name(), xv);
      double got = f->mass(query);
      CHECK(std::abs(got - truth[cell]) <= tol);
    }
  }
}

}  // namespace

TEST_CASE("latent projection: chains, forks, and mixed rewrites") {
  // X -> L -> S with L latent: projected to X -> S
  std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                    {"L", {"0", "1"}, false, Role::Plain},
                                    {"S", {"0", "1"}, true, Role::Plain},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag chain = Ldag::create(
      vars, {{"X", "L", {}}, {"L", "S", {}}, {"X", "Y", {}}, {"S", "Y", {}}},
      {});
  Admg a = latent_project(chain);
  CHECK(a.vertices.size() == 2);
  CHECK(has_directed(a, "X", "S"));
  CHECK(a.bidirected.empty());

  // X <- L -> S: bidirected X <-> S
  Ldag fork = Ldag::create(
      vars, {{"L", "X", {}}, {"L", "S", {}}, {"X", "Y", {}}, {"S", "Y", {}}},
      {});
  Admg b = latent_project(fork);
  CHECK(has_bidirected(b, "X", "S"));
  CHECK_FALSE(has_directed(b, "X", "S"));

  // latent chain L1 -> L2 with children on both: still a common cause
  std::vector<VariableDecl> vars2 = {{"X", {"0", "1"}, true, Role::Action},
                                     {"L1", {"0", "1"}, false, Role::Plain},
                                     {"L2", {"0", "1"}, false, Role::Plain},
                                     {"S", {"0", "1"}, true, Role::Plain},
                                     {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag deep = Ldag::create(vars2,
                           {{"L1", "L2", {}},
                            {"L1", "X", {}},
                            {"L2", "S", {}},
                            {"X", "Y", {}},
                            {"S", "Y", {}}},
                           {});
  Admg c = latent_project(deep);
  CHECK(has_bidirected(c, "X", "S"));
}

TEST_CASE("identification: backdoor-adjustable effect matches the engine") {
  // C -> X, C -> S, X -> S, everything observed except the reward shell
  std::vector<VariableDecl> vars = {{"C", {"0", "1"}, true, Role::Plain},
                                    {"X", {"0", "1"}, true, Role::Action},
                                    {"S", {"0", "1"}, true, Role::Plain},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag g = Ldag::create(
      vars,
      {{"C", "X", {}}, {"C", "S", {}}, {"X", "S", {}}, {"S", "Y", {}}},
      {"C"});
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    check_identified_effect(g, {"S"}, seed);
  }
}

TEST_CASE("identification: front-door mediation through an observed proxy") {
  // U confounds X and S; X -> M -> S with M observed: identifiable
  std::vector<VariableDecl> vars = {{"U", {"0", "1"}, false, Role::Plain},
                                    {"X", {"0", "1"}, true, Role::Action},
                                    {"M", {"0", "1"}, true, Role::Plain},
                                    {"S", {"0", "1"}, true, Role::Plain},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag g = Ldag::create(vars,
                        {{"U", "X", {}},
                         {"U", "S", {}},
                         {"X", "M", {}},
                         {"M", "S", {}},
                         {"S", "Y", {}},
                         {"X", "Y", {}}},
                        {});
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    check_identified_effect(g, {"S"}, seed);
  }
}

TEST_CASE("identification: the confounded bow is rejected") {
  // U -> X, U -> S, X -> S: P(S | do(x)) is not identifiable
  std::vector<VariableDecl> vars = {{"U", {"0", "1"}, false, Role::Plain},
                                    {"X", {"0", "1"}, true, Role::Action},
                                    {"S", {"0", "1"}, true, Role::Plain},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag g = Ldag::create(
      vars,
      {{"U", "X", {}}, {"U", "S", {}}, {"X", "S", {}}, {"S", "Y", {}}},
      {});
  DiscreteScm m = random_scm_for_ldag(g, 5);
  JointTable obs = joint_distribution(m).marginal(g.observed_names());
  auto f = identify_effect(latent_project(g), obs, {"S"}, "X");
  CHECK_FALSE(f.has_value());
}

TEST_CASE("identification: joint targets over several districts") {
  // two observed targets with separate confounding structure
  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Plain},
                                    {"X", {"0", "1"}, true, Role::Action},
                                    {"S", {"0", "1"}, true, Role::Plain},
                                    {"B", {"0", "1"}, true, Role::Plain},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag g = Ldag::create(vars,
                        {{"A", "X", {}},
                         {"A", "B", {}},
                         {"X", "S", {}},
                         {"S", "B", {}},
                         {"S", "Y", {}}},
                        {"A"});
  for (std::uint64_t seed : {21ull, 22ull}) {
    check_identified_effect(g, {"S", "B"}, seed);
    check_identified_effect(g, {"S", "A"}, seed);
  }
}

TEST_CASE("identification on random unlabeled graphs agrees with the engine") {
  std::mt19937_64 rng(99);
  CensusConfig cfg;
  cfg.n = 6;
  cfg.max_degree = 4;
  cfg.label_prob = 0.0;
  int identified = 0;
  for (int t = 0; t < 60; ++t) {
    Ldag g = random_ldag(cfg, 1000 + t);
    DiscreteScm m = random_scm_for_ldag(g, 2000 + t);
    JointTable obs = joint_distribution(m).marginal(g.observed_names());
    // pick a random observed non-action target
    std::vector<std::string> cands;
    for (const auto& v : g.variables()) {
      if (v.observed && v.name != g.action_name()) cands.push_back(v.name);
    }
    if (cands.empty()) continue;
    std::set<std::string> s{cands[rng() % cands.size()]};
    auto f = identify_effect(latent_project(g), obs, s, g.action_name());
    if (!f) continue;
    ++identified;
    const std::string target = *s.begin();
    for (const auto& xv : g.variable(g.action_index()).domain) {
      PartialAssignment dox;
      dox.bind(g.action_name(), xv);
      JointTable truth = interventional(m, dox).marginal({target});
      for (std::size_t k = 0; k < truth.size(); ++k) {
        PartialAssignment q;
        q.bind(target, truth.scope()[0].domain[k]);
        q.bind(g.action_name(), xv);
        CHECK(std::abs(f->mass(q) - truth[k]) <= 1e-10);
      }
    }
  }
  CHECK(identified >= 20);
}
