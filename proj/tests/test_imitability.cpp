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

namespace {

// 4-vertex instance whose two contexts sever the action-reward connection in
// complementary ways; the context variable gates both labeled edges.
Ldag two_sided_context_graph() {
  std::vector<VariableDecl> vars = {{"C", {"0", "1"}, true, Role::Plain},
                                    {"U", {"0", "1"}, false, Role::Plain},
                                    {"X", {"0", "1"}, true, Role::Action},
                                    {"Y", {"0", "1"}, false, Role::Reward}};
  PartialAssignment c0{{"C", "0"}};
  PartialAssignment c1{{"C", "1"}};
  return Ldag::create(vars,
                      {{"C", "X", {}},
                       {"C", "Y", {}},
                       {"U", "X", {c0}},
                       {"U", "Y", {c1}},
                       {"X", "Y", {}}},
                      {"C"});
}

}  // namespace

TEST_CASE("find_sep: the canonical policy-scope separator") {
  SUBCASE("cruise control separates through {Z, T}") {
    auto z = find_sep(scenarios::driving_cruise_control());
    REQUIRE(z.has_value());
    CHECK(*z == std::vector<std::string>{"Z", "T"});
  }

  SUBCASE("the latent speed limit blocks separation") {
    CHECK_FALSE(find_sep(scenarios::driving_confounded()).has_value());
  }

  SUBCASE("a bare edge with empty scope is already separated") {
    std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                      {"Y", {"0", "1"}, false, Role::Reward}};
    Ldag g = Ldag::create(vars, {{"X", "Y", {}}}, {});
    auto z = find_sep(g);
    REQUIRE(z.has_value());
    CHECK(z->empty());
  }
}

TEST_CASE("classic decisions on the driving graphs") {
  auto model = random_scm_for_ldag(scenarios::driving_cruise_control(), 7);
  auto obs =
      joint_distribution(model).marginal(model.graph().observed_names());

  SUBCASE("imitable with the conditional policy") {
    auto v = classic_imitable(scenarios::driving_cruise_control(), obs);
    CHECK(v.decision == Decision::Imitable);
    REQUIRE(v.policy.has_value());
    CHECK(v.policy->scope.size() == 2);
    // the policy is the observational conditional P(X | Z, T)
    for (std::size_t r = 0; r < v.policy->row_count(); ++r) {
      auto expect =
          obs.distribution_of("X", v.policy->row_assignment(r));
      for (std::size_t k = 0; k < expect.size(); ++k) {
        CHECK(v.policy->rows[r][k] ==
              doctest::Approx(expect[k]).epsilon(1e-12));
      }
    }
    CHECK(oracles::verify_policy(model, *v.policy, 1e-9));
  }

  SUBCASE("not imitable under confounding") {
    auto v = classic_imitable(scenarios::driving_confounded());
    CHECK(v.decision == Decision::NotImitable);
    REQUIRE(v.witness.has_value());
  }

  SUBCASE("labeled graphs are routed to the general procedure") {
    CHECK_THROWS_AS(classic_imitable(scenarios::driving_traffic_context()),
                    InputError);
  }

  SUBCASE("an action that cannot reach the reward imitates trivially") {
    std::vector<VariableDecl> vars = {{"X", {"0", "1"}, true, Role::Action},
                                      {"Y", {"0", "1"}, false, Role::Reward}};
    Ldag g = Ldag::create(vars, {{"Y", "X", {}}}, {},
                          Ldag::Validation::Structural);
    auto v = classic_imitable(g);
    CHECK(v.decision == Decision::Imitable);
    REQUIRE(v.policy.has_value());
    CHECK(v.policy->scope.empty());
    REQUIRE_FALSE(v.notes.empty());
  }
}

TEST_CASE("per-context checks expose which contexts admit imitation") {
  SUBCASE("the traffic-context graph fails only in light traffic") {
    auto results = corollary1_check(scenarios::driving_traffic_context());
    REQUIRE(results.size() == 2);
    // lexicographic enumeration: T=0 first
    CHECK(results[0].context.at("T") == "0");
    CHECK_FALSE(results[0].separator.has_value());
    CHECK(results[1].context.at("T") == "1");
    CHECK(results[1].separator.has_value());
  }

  SUBCASE("the pricing graph fails in the expansion context") {
    auto results = corollary1_check(scenarios::pricing_recession());
    REQUIRE(results.size() == 2);
    CHECK(results[0].separator.has_value());        // C=0
    CHECK_FALSE(results[1].separator.has_value());  // C=1
  }

  SUBCASE("a label-free graph has the single empty context") {
    auto results = corollary1_check(scenarios::driving_cruise_control());
    REQUIRE(results.size() == 1);
    CHECK(results[0].context.empty());
    CHECK(results[0].separator.has_value());
  }

  SUBCASE("the context cap turns into a resource error") {
    DecisionOptions opt;
    opt.context_cap = 1;
    CHECK_THROWS_AS(
        corollary1_check(scenarios::mediated_context_pair(), opt),
        ResourceCapError);
  }

  SUBCASE("threaded and sequential runs agree") {
    DecisionOptions two;
    two.threads = 2;
    auto seq = corollary1_check(scenarios::mediated_context_pair());
    auto par = corollary1_check(scenarios::mediated_context_pair(), two);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq[i].context == par[i].context);
      CHECK(seq[i].separator == par[i].separator);
    }
  }
}

TEST_CASE("the general decision procedure") {
  SUBCASE("pricing graph: not imitable, witnessed by the expansion context") {
    auto v = imitate1(scenarios::pricing_recession());
    CHECK(v.decision == Decision::NotImitable);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->at("C") == "1");
  }

  SUBCASE("two-sided context graph: imitable with per-context conditionals") {
    Ldag g = two_sided_context_graph();
    auto m = random_scm_for_ldag(g, 31);
    auto obs = joint_distribution(m).marginal(g.observed_names());
    auto v = imitate1(g, obs);
    CHECK(v.decision == Decision::Imitable);
    REQUIRE(v.policy.has_value());
    // policy rows are P(x | C=c)
    for (const auto& value : {"0", "1"}) {
      PartialAssignment row;
      row.bind("C", value);
      auto expect = obs.distribution_of("X", row);
      auto got = v.policy->row_for(row);
      for (std::size_t k = 0; k < expect.size(); ++k) {
        CHECK(got[k] == doctest::Approx(expect[k]).epsilon(1e-12));
      }
    }
    // and the assembled mixture matches the observational reward exactly
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto mm = random_scm_for_ldag(g, 1000 + seed);
      auto oo = joint_distribution(mm).marginal(g.observed_names());
      auto vv = imitate1(g, oo);
      REQUIRE(vv.decision == Decision::Imitable);
      CHECK(oracles::verify_policy(mm, *vv.policy, 1e-9));
    }
  }

  SUBCASE("label-free graphs reduce to the classic decision") {
    CensusConfig cfg;
    cfg.n = 12;
    cfg.max_degree = 5;
    cfg.label_prob = 0.0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      Ldag g = random_ldag(cfg, seed);
      auto general = imitate1(g);
      auto classic = classic_imitable(g);
      CHECK(general.decision == classic.decision);
    }
  }

  SUBCASE("unreachable contexts get uniform rows, flagged") {
    Ldag g = two_sided_context_graph();
    auto base = random_scm_for_ldag(g, 5);
    auto cpts = base.cpts();
    cpts[g.index_of("C")].rows[0] = {1.0, 0.0};  // C=1 never happens
    auto m = DiscreteScm::create(g, cpts);
    auto obs = joint_distribution(m).marginal(g.observed_names());
    auto v = imitate1(g, obs);
    REQUIRE(v.decision == Decision::Imitable);
    REQUIRE(v.policy.has_value());
    PartialAssignment dead{{"C", "1"}};
    auto row = v.policy->row_for(dead);
    CHECK(row[0] == doctest::Approx(0.5));
    std::size_t idx = v.policy->row_index(dead);
    CHECK(v.policy->row_notes[idx].find("uniform") != std::string::npos);
  }

  SUBCASE("context parents outside the context set suspend sufficiency") {
    // extend the two-sided graph with an observed parent of C
    std::vector<VariableDecl> vars = {{"P", {"0", "1"}, true, Role::Plain},
                                      {"C", {"0", "1"}, true, Role::Plain},
                                      {"U", {"0", "1"}, false, Role::Plain},
                                      {"X", {"0", "1"}, true, Role::Action},
                                      {"Y", {"0", "1"}, false, Role::Reward}};
    PartialAssignment c0{{"C", "0"}};
    PartialAssignment c1{{"C", "1"}};
    Ldag g = Ldag::create(vars,
                          {{"P", "C", {}},
                           {"C", "X", {}},
                           {"C", "Y", {}},
                           {"U", "X", {c0}},
                           {"U", "Y", {c1}},
                           {"X", "Y", {}}},
                          {"P", "C"});
    auto v = imitate1(g);
    CHECK(v.decision == Decision::Unknown);
    REQUIRE_FALSE(v.notes.empty());
  }

  SUBCASE("context variables outside the policy scope leave the policy out") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses = {{1, 2, 3}, {-1, 2, 3}, {1, -2, 3}, {1, 2, -3},
                 {-1, -2, 3}, {-1, 2, -3}, {1, -2, -3}, {-1, -2, -3}};
    REQUIRE_FALSE(oracles::exhaustive_sat(f));
    auto v = imitate1(sat_to_ldag(f));
    CHECK(v.decision == Decision::Imitable);
    CHECK_FALSE(v.policy.has_value());
    REQUIRE_FALSE(v.notes.empty());
  }

  SUBCASE("graph-only mode returns policy shapes") {
    auto v = imitate1(scenarios::driving_cruise_control());
    CHECK(v.decision == Decision::Imitable);
    REQUIRE(v.policy.has_value());
    CHECK(v.policy->shape_only);
  }
}

TEST_CASE("soundness: mixtures verified by the exact engine") {
  CensusConfig cfg;
  cfg.n = 7;
  cfg.max_degree = 4;
  cfg.num_context_vars = 2;
  int imitable = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Ldag g = random_ldag(cfg, 50000 + seed);
    {
      // the mixture needs the context variables inside the policy scope
      auto ctx = context_variables(g);
      std::set<std::string> scope(g.policy_scope().begin(),
                                  g.policy_scope().end());
      bool ok = true;
      for (const auto& name : ctx) ok = ok && scope.count(name) > 0;
      if (!ok) continue;
    }
    for (std::uint64_t ms = 0; ms < 3; ++ms) {
      auto m = random_scm_for_ldag(g, seed * 10 + ms);
      auto obs = joint_distribution(m).marginal(g.observed_names());
      auto v = imitate1(g, obs);
      if (v.decision != Decision::Imitable) break;
      ++imitable;
      REQUIRE(v.policy.has_value());
      CHECK(oracles::verify_policy(m, *v.policy, 1e-9));
    }
  }
  CHECK(imitable > 10);
}

TEST_CASE("verdict JSON carries the decision and artifacts") {
  auto v = imitate1(scenarios::pricing_recession());
  auto text = serialize_verdict_json(v);
  CHECK(text.find("not_imitable") != std::string::npos);
  CHECK(text.find("witness") != std::string::npos);
  CHECK(decision_exit_code(v.decision) == 2);
  CHECK(decision_exit_code(Decision::Imitable) == 0);
  CHECK(decision_exit_code(Decision::Unknown) == 3);
}
