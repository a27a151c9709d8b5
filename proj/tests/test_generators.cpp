#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"
#include "csimit/generators.hpp"
#include "csimit/imitability.hpp"
#include "csimit/oracles.hpp"
#include "csimit/scenarios.hpp"
#include "csimit/scm.hpp"

using namespace csimit;

TEST_CASE("random labeled DAGs satisfy the structural contract") {
  CensusConfig cfg;
  cfg.n = 50;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Ldag g = random_ldag(cfg, seed);

    // degree cap
    std::vector<int> degree(g.size(), 0);
    for (const auto& e : g.edges()) {
      ++degree[g.index_of(e.from)];
      ++degree[g.index_of(e.to)];
    }
    for (int d : degree) CHECK(d <= cfg.degree_cap());

    // ancestrally closed context set
    auto ctx = context_variables(g);
    std::set<std::string> ctx_set(ctx.begin(), ctx.end());
    for (const auto& name : ctx) {
      CHECK(g.parents(g.index_of(name)).empty());
      CHECK(g.variable(g.index_of(name)).observed);
    }
    CHECK(ctx.size() <= static_cast<std::size_t>(cfg.num_context_vars));

    // reward reachable from the action
    CHECK(descendants(g, {g.action_name()}).count(g.reward_name()));
  }
}

TEST_CASE("generated frequencies track the configuration") {
  CensusConfig cfg;
  cfg.n = 30;
  std::uint64_t latent_count = 0, latent_eligible = 0;
  std::uint64_t label_count = 0, label_eligible = 0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t) {
    Ldag g = random_ldag(cfg, 40000 + t);
    std::set<std::string> ctx;
    for (const auto& name : context_variables(g)) ctx.insert(name);
    for (const auto& v : g.variables()) {
      if (v.role != Role::Plain) continue;
      ++latent_eligible;
      if (!v.observed) ++latent_count;
    }
    for (const auto& e : g.edges()) {
      bool eligible = false;
      for (const auto& p : g.parent_names(e.to)) {
        // a context-variable parent besides the tail makes the edge eligible
        if (p != e.from && g.parents(g.index_of(p)).empty() &&
            g.variable(g.index_of(p)).observed) {
          eligible = true;
        }
      }
      if (!eligible) continue;
      label_eligible += 2;  // one candidate label per binary realization
      label_count += e.labels.size();
    }
  }
  // binomial 3-sigma bands
  double p_latent = 1.0 / 6.0;
  double latent_hat =
      static_cast<double>(latent_count) / static_cast<double>(latent_eligible);
  double sigma_latent = std::sqrt(p_latent * (1 - p_latent) /
                                  static_cast<double>(latent_eligible));
  CHECK(std::abs(latent_hat - p_latent) <= 3 * sigma_latent);

  double label_hat =
      static_cast<double>(label_count) / static_cast<double>(label_eligible);
  double sigma_label =
      std::sqrt(0.5 * 0.5 / static_cast<double>(label_eligible));
  // eligibility here over-counts slightly (roots that are not context
  // variables), so allow a one-sided slack below the nominal rate
  CHECK(label_hat <= 0.5 + 3 * sigma_label);
  CHECK(label_hat >= 0.25);
}

TEST_CASE("generator determinism and label knob") {
  CensusConfig cfg;
  cfg.n = 40;
  Ldag a = random_ldag(cfg, 5);
  Ldag b = random_ldag(cfg, 5);
  CHECK(serialize_ldag_json(a) == serialize_ldag_json(b));

  cfg.label_prob = 0.0;
  Ldag c = random_ldag(cfg, 5);
  CHECK(context_variables(c).empty());
}

TEST_CASE("random models honor every label by construction") {
  CensusConfig cfg;
  cfg.n = 9;
  cfg.max_degree = 4;
  cfg.num_context_vars = 2;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Ldag g = random_ldag(cfg, 700 + seed);
    DiscreteScm m = random_scm_for_ldag(g, seed);
    CHECK(validate_csi(m).empty());
  }
  // determinism
  Ldag g = random_ldag(cfg, 701);
  auto m1 = random_scm_for_ldag(g, 9);
  auto m2 = random_scm_for_ldag(g, 9);
  CHECK(serialize_scm_json(m1) == serialize_scm_json(m2));
}

TEST_CASE("one-variable-style degenerate model") {
  std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  Ldag g = Ldag::create(vars, {{"X", "Y", {}}}, {});
  auto m = random_scm_for_ldag(g, 123);
  auto t = joint_distribution(m);
  CHECK(t.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("DIMACS parsing and serialization") {
  std::string text =
      "c a comment\n"
      "p cnf 4 2\n"
      "1 -2 3 0\n"
      "-1 2 4 0\n";
  auto f = CnfFormula::parse_dimacs(text);
  CHECK(f.num_vars == 4);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == std::array<int, 3>{1, -2, 3});
  auto round = CnfFormula::parse_dimacs(f.to_dimacs());
  CHECK(round.clauses == f.clauses);

  CHECK_THROWS_AS(CnfFormula::parse_dimacs("1 2 3 0\n"), InputError);
  CHECK_THROWS_AS(CnfFormula::parse_dimacs("p cnf 3 1\n1 1 2 0\n"),
                  InputError);
  CHECK_THROWS_AS(CnfFormula::parse_dimacs("p cnf 3 1\n1 2 0\n"), InputError);
}

TEST_CASE("the satisfiability reduction") {
  SUBCASE("structure: context variables are roots, so the criterion is exact") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses = {{1, 2, 3}, {-1, -2, 3}};
    Ldag g = sat_to_ldag(f);
    auto ctx = context_variables(g);
    for (const auto& name : ctx) {
      CHECK(g.parents(g.index_of(name)).empty());
    }
    CHECK(g.policy_scope() == std::vector<std::string>{"I_X"});
    CHECK(g.has_edge("S0", "X"));
    CHECK(g.has_edge("X", "Y"));
    CHECK(g.has_edge("S2", "Y"));
  }

  SUBCASE("satisfiable instances are not imitable") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses = {{1, 2, 3}, {-1, 2, 3}};
    REQUIRE(oracles::exhaustive_sat(f));
    auto v = imitate1(sat_to_ldag(f));
    CHECK(v.decision == Decision::NotImitable);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->at("I_X") == "0");
  }

  SUBCASE("unsatisfiable instances are imitable") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses.clear();
    for (int s1 : {1, -1}) {
      for (int s2 : {2, -2}) {
        for (int s3 : {3, -3}) f.clauses.push_back({s1, s2, s3});
      }
    }
    REQUIRE_FALSE(oracles::exhaustive_sat(f));
    CHECK(imitate1(sat_to_ldag(f)).decision == Decision::Imitable);
  }

  SUBCASE("the empty formula is satisfiable, hence not imitable") {
    CnfFormula f;
    f.num_vars = 3;
    auto v = imitate1(sat_to_ldag(f));
    CHECK(v.decision == Decision::NotImitable);
  }
}

TEST_CASE("the pricing scenario model matches its published values") {
  auto m = scenarios::pricing_six_variable_scm();
  CHECK(validate_csi(m).empty());
  auto joint = joint_distribution(m);
  CHECK(joint.marginal({"C"})[1] == doctest::Approx(0.05).epsilon(1e-12));
  auto y_c1 = joint.condition({{"C", "1"}}).marginal({"Y"});
  CHECK(y_c1[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(y_c1[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y_c1[2] == doctest::Approx(0.3).epsilon(1e-12));
  double ey = expected_value(joint.marginal({"Y"}),
                             {{"0", 0.0}, {"1", 1.0}, {"2", 2.0}});
  CHECK(std::abs(ey - 1.367) <= 0.02);
  REQUIRE_FALSE(m.notes().empty());
}
