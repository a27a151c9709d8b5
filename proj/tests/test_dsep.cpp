#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "csimit/dsep.hpp"
#include "csimit/oracles.hpp"
#include "csimit/scenarios.hpp"

using namespace csimit;

namespace {

Ldag random_dag(std::mt19937_64& rng, int n, double p) {
  std::vector<VariableDecl> decls;
  for (int v = 0; v < n; ++v) {
    Role role = Role::Plain;
    if (v == 0) role = Role::Action;
    if (v == n - 1) role = Role::Reward;
    decls.push_back({"V" + std::to_string(v), {"0", "1"}, true, role});
  }
  std::vector<LabeledEdge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) {
        edges.push_back(
            {"V" + std::to_string(i), "V" + std::to_string(j), {}});
      }
    }
  }
  return Ldag::create(std::move(decls), std::move(edges), {},
                      Ldag::Validation::Structural);
}

}  // namespace

TEST_CASE("ancestors and descendants are reflexive-transitive closures") {
  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                    {"B", {"0", "1"}, true, Role::Plain},
                                    {"C", {"0", "1"}, false, Role::Reward},
                                    {"D", {"0", "1"}, true, Role::Plain}};
  Ldag g = Ldag::create(vars, {{"A", "B", {}}, {"B", "C", {}}}, {});
  CHECK(ancestors(g, {"C"}) == std::set<std::string>{"A", "B", "C"});
  CHECK(descendants(g, {"A"}) == std::set<std::string>{"A", "B", "C"});
  CHECK(descendants(g, {"D"}) == std::set<std::string>{"D"});

  Ldag fig = scenarios::driving_confounded();
  auto an = ancestors(fig, {"X", "Y"});
  for (const auto& name : {"Z", "T", "S", "X", "Y"}) CHECK(an.count(name));
}

TEST_CASE("ancestors are monotone in the query set") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 50; ++t) {
    Ldag g = random_dag(rng, 4 + static_cast<int>(rng() % 6), 0.35);
    std::set<std::string> small{g.variable(0).name};
    std::set<std::string> big = small;
    big.insert(g.variable(static_cast<int>(g.size()) - 1).name);
    auto a_small = ancestors(g, small);
    auto a_big = ancestors(g, big);
    for (const auto& v : a_small) CHECK(a_big.count(v));
  }
}

TEST_CASE("the driving scenarios separate exactly as expected") {
  Ldag cruise = mutilate(scenarios::driving_cruise_control(), {}, {"X"});
  CHECK(d_separated(cruise, {"X"}, {"Y"}, {"Z", "T"}));

  Ldag confounded = mutilate(scenarios::driving_confounded(), {}, {"X"});
  CHECK_FALSE(d_separated(confounded, {"X"}, {"Y"}, {"Z", "T"}));
}

TEST_CASE("two isolated vertices are separated by anything") {
  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                    {"B", {"0", "1"}, true, Role::Reward}};
  Ldag g = Ldag::create(vars, {}, {}, Ldag::Validation::Structural);
  CHECK(d_separated(g, {"A"}, {"B"}, {}));
}

TEST_CASE("overlapping query sets are rejected") {
  Ldag g = scenarios::driving_confounded();
  CHECK_THROWS_AS(d_separated(g, {"X"}, {"X"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(d_separated(g, {"X"}, {"Y"}, {"X"}), std::invalid_argument);
}

TEST_CASE("reachability agrees with the path-enumeration oracle") {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    int n = 4 + static_cast<int>(rng() % 6);
    Ldag g = random_dag(rng, n, 0.3);
    for (int q = 0; q < 10; ++q) {
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
      CHECK(d_separated(g, xs, ys, zs) ==
            oracles::dsep_by_paths(g, xs, ys, zs));
      ++checked;
    }
  }
  CHECK(checked == 1200);
}

TEST_CASE("minimal separators: worked cases") {
  SUBCASE("pricing graph with policy edges") {
    Ldag g = add_policy_edges(scenarios::pricing_recession());
    auto z = find_min_sep(g, "X", "Y", {}, {"S", "C"});
    REQUIRE(z.has_value());
    CHECK(*z == std::vector<std::string>{"S"});
  }

  SUBCASE("sales chain at C=0 with policy edges, C required") {
    Ldag gc = context_specific_dag(scenarios::sales_chain(), {{"C", "0"}});
    Ldag g = add_policy_edges(gc);
    auto z = find_min_sep(g, "X", "Y", {"C"}, {"S", "W", "C", "T"});
    REQUIRE(z.has_value());
    CHECK(*z == std::vector<std::string>{"C", "S"});
  }

  SUBCASE("already-separated endpoints return the required set") {
    std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                      {"B", {"0", "1"}, true, Role::Plain},
                                      {"C", {"0", "1"}, true, Role::Reward}};
    Ldag g = Ldag::create(vars, {{"B", "A", {}}, {"B", "C", {}}}, {},
                          Ldag::Validation::Structural);
    auto z = find_min_sep(g, "A", "C", {"B"}, {"B"});
    REQUIRE(z.has_value());
    CHECK(*z == std::vector<std::string>{"B"});
  }

  SUBCASE("no separator within allowed") {
    Ldag g = scenarios::driving_confounded();  // X <- S -> Y with S latent
    auto z = find_min_sep(g, "X", "Y", {}, {"Z", "T"});
    CHECK_FALSE(z.has_value());
  }
}

TEST_CASE("minimal separators: correctness and minimality on random DAGs") {
  std::mt19937_64 rng(4242);
  int found = 0;
  for (int t = 0; t < 200; ++t) {
    int n = 5 + static_cast<int>(rng() % 5);
    Ldag g = random_dag(rng, n, 0.35);
    std::string x = g.variable(0).name;
    std::string y = g.variable(static_cast<int>(g.size()) - 1).name;
    std::set<std::string> allowed;
    for (std::size_t v = 1; v + 1 < g.size(); ++v) {
      if (rng() % 4 != 0) allowed.insert(g.variable(static_cast<int>(v)).name);
    }
    std::set<std::string> required;
    if (!allowed.empty() && rng() % 3 == 0) required.insert(*allowed.begin());

    auto z = find_min_sep(g, x, y, required, allowed);
    if (!z) {
      // completeness: the maximal ancestral candidate must fail too
      std::set<std::string> seed = required;
      seed.insert(x);
      seed.insert(y);
      auto an = ancestors(g, seed);
      std::set<std::string> z0;
      for (const auto& name : allowed) {
        if (an.count(name)) z0.insert(name);
      }
      CHECK_FALSE(d_separated(g, {x}, {y}, z0));
      continue;
    }
    ++found;
    std::set<std::string> zs(z->begin(), z->end());
    CHECK(d_separated(g, {x}, {y}, zs));
    for (const auto& name : *z) {
      if (required.count(name)) continue;
      std::set<std::string> smaller = zs;
      smaller.erase(name);
      CHECK_FALSE(d_separated(g, {x}, {y}, smaller));
    }
    for (const auto& name : required) CHECK(zs.count(name));
  }
  CHECK(found > 50);
}
