#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csimit/dsep.hpp"
#include "csimit/generators.hpp"
#include "csimit/imitability.hpp"
#include "csimit/oracles.hpp"
#include "csimit/scenarios.hpp"
#include "csimit/scm.hpp"

using namespace csimit;

TEST_CASE("path enumeration on the driving graphs") {
  Ldag confounded = mutilate(scenarios::driving_confounded(), {}, {"X"});
  CHECK_FALSE(oracles::dsep_by_paths(confounded, {"X"}, {"Y"}, {"Z", "T"}));

  Ldag cruise = mutilate(scenarios::driving_cruise_control(), {}, {"X"});
  CHECK(oracles::dsep_by_paths(cruise, {"X"}, {"Y"}, {"Z", "T"}));

  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                    {"B", {"0", "1"}, true, Role::Reward}};
  Ldag empty = Ldag::create(vars, {}, {}, Ldag::Validation::Structural);
  CHECK(oracles::dsep_by_paths(empty, {"A"}, {"B"}, {}));
}

TEST_CASE("policy verification distinguishes real from fake imitation") {
  SUBCASE("any policy passes when the reward ignores the action") {
    std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                      {"Y", {"0", "1"}, false, Role::Reward}};
    Ldag g = Ldag::create(vars, {{"Y", "X", {}}}, {},
                          Ldag::Validation::Structural);
    auto m = random_scm_for_ldag(g, 17);
    PolicyTable pi = PolicyTable::uniform(g, {});
    CHECK(oracles::verify_policy(m, pi, 1e-12));
  }

  SUBCASE("a uniform policy fails under strong confounding") {
    Ldag g = scenarios::driving_confounded();
    auto adv = oracles::adversarial_scm_search(g, 40, 99);
    REQUIRE(adv.best_model.has_value());
    PolicyTable uniform = PolicyTable::uniform(g, {});
    CHECK_FALSE(oracles::verify_policy(*adv.best_model, uniform, 1e-3));
  }
}

TEST_CASE("independent enumerator matches the production engine") {
  auto report = oracles::run_policy_suite(100, 5);
  CHECK(report.checked == 100);
  CHECK(report.pass());
}

TEST_CASE("point interventions agree with the truncated-product oracle") {
  CensusConfig cfg;
  cfg.n = 8;
  cfg.max_degree = 4;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Ldag g = random_ldag(cfg, 600 + seed);
    DiscreteScm m = random_scm_for_ldag(g, seed);
    for (const auto& xv : g.variable(g.action_index()).domain) {
      // a point mass expressed as a scope-free policy
      PolicyTable point = PolicyTable::uniform(g, {});
      point.rows[0].assign(point.action_domain.size(), 0.0);
      point.rows[0][g.variable(g.action_index()).domain[0] == xv ? 0 : 1] =
          1.0;
      auto via_policy = oracles::policy_gap(m, point);
      PartialAssignment dox;
      dox.bind(g.action_name(), xv);
      auto engine_y = interventional(m, dox).marginal({g.reward_name()});
      auto obs_y = joint_distribution(m).marginal({g.reward_name()});
      double engine_gap = 0.0;
      for (std::size_t i = 0; i < engine_y.size(); ++i) {
        engine_gap = std::max(engine_gap, std::abs(engine_y[i] - obs_y[i]));
      }
      CHECK(std::abs(via_policy - engine_gap) <= 1e-12);
    }
  }
}

TEST_CASE("adversarial search on the driving graphs") {
  SUBCASE("confounded: a large best-policy gap appears quickly") {
    auto adv =
        oracles::adversarial_scm_search(scenarios::driving_confounded(), 200, 7);
    CHECK(adv.best_gap >= 0.1);
  }

  SUBCASE("failing contexts come with adversarial evidence") {
    // graphs rejected by the per-context criterion admit models where no
    // table policy comes close
    for (const Ldag& g : {scenarios::pricing_recession(),
                          scenarios::driving_traffic_context()}) {
      bool some_context_fails = false;
      for (const auto& r : corollary1_check(g)) {
        if (!r.separator) some_context_fails = true;
      }
      REQUIRE(some_context_fails);
      auto adv = oracles::adversarial_scm_search(g, 200, 13);
      CHECK(adv.best_gap > 1e-3);
    }
  }

  SUBCASE("imitable: the backdoor policy annihilates the gap") {
    Ldag g = scenarios::driving_cruise_control();
    auto backdoor = find_sep(g);
    REQUIRE(backdoor.has_value());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto m = random_scm_for_ldag(g, 400 + seed);
      auto obs = joint_distribution(m).marginal(g.observed_names());
      PolicyTable pi = PolicyTable::uniform(g, *backdoor);
      for (std::size_t r = 0; r < pi.row_count(); ++r) {
        pi.rows[r] = obs.distribution_of("X", pi.row_assignment(r));
      }
      CHECK(oracles::policy_gap(m, pi) <= 1e-9);
    }
  }

  SUBCASE("no gap when the reward ignores the action") {
    std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                      {"Y", {"0", "1"}, false, Role::Reward},
                                      {"Z", {"0", "1"}, true, Role::Plain}};
    Ldag g =
        Ldag::create(vars, {{"Z", "X", {}}, {"Z", "Y", {}}}, {"Z"},
                     Ldag::Validation::Structural);
    auto adv = oracles::adversarial_scm_search(g, 25, 3);
    CHECK(adv.best_gap <= 1e-9);
  }
}

TEST_CASE("truth-table satisfiability") {
  CnfFormula sat;
  sat.num_vars = 3;
  sat.clauses = {{1, 2, 3}, {-1, -2, -3}};
  CHECK(oracles::exhaustive_sat(sat));

  CnfFormula unsat;
  unsat.num_vars = 3;
  for (int a : {1, -1}) {
    for (int b : {2, -2}) {
      for (int c : {3, -3}) unsat.clauses.push_back({a, b, c});
    }
  }
  CHECK_FALSE(oracles::exhaustive_sat(unsat));

  CnfFormula empty;
  empty.num_vars = 2;
  CHECK_THROWS(oracles::exhaustive_sat(CnfFormula{}));  // no variables
  empty.num_vars = 3;
  CHECK(oracles::exhaustive_sat(empty));  // no clauses: trivially satisfiable
}

TEST_CASE("oracle suites run clean") {
  auto dsep = oracles::run_dsep_suite(40, 10, 11);
  CHECK(dsep.checked == 400);
  CHECK(dsep.pass());

  auto sat = oracles::run_sat_suite(10, 13);
  CHECK(sat.checked == 10);
  CHECK(sat.pass());

  auto text = dsep.to_json();
  CHECK(text.find("\"pass\": true") != std::string::npos);
}
