#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csimit/errors.hpp"
#include "csimit/generators.hpp"
#include "csimit/ldag.hpp"
#include "csimit/scenarios.hpp"

using namespace csimit;

namespace {

bool has_edge(const Ldag& g, const std::string& from, const std::string& to) {
  return g.has_edge(from, to);
}

std::size_t label_count(const Ldag& g) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.labels.size();
  return n;
}

}  // namespace

TEST_CASE("partial assignments: restriction, compatibility, implication") {
  PartialAssignment s{{"A", "0"}, {"B", "1"}, {"C", "0"}};
  auto r = s.restrict_to(std::vector<std::string>{"A", "C"});
  CHECK(r.size() == 2);
  CHECK(r.at("A") == "0");
  CHECK(r.at("C") == "0");
  CHECK_FALSE(r.binds("B"));

  PartialAssignment label{{"A", "0"}};
  PartialAssignment other{{"A", "1"}};
  CHECK(s.compatible_with(label));
  CHECK_FALSE(s.compatible_with(other));
  CHECK(s.extends(label));
  CHECK_FALSE(label.extends(s));
  CHECK(PartialAssignment{}.compatible_with(s));
  CHECK(s.to_key() == "A=0,B=1,C=0");
}

TEST_CASE("construction validates roles, domains, labels, and scope") {
  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                    {"B", {"0", "1"}, false, Role::Reward}};
  CHECK_NOTHROW(Ldag::create(vars, {{"A", "B", {}}}, {}));

  // reward must descend from the action
  CHECK_THROWS_AS(Ldag::create(vars, {}, {}), InputError);

  // labels must bind parents of the head
  std::vector<VariableDecl> vars3 = {{"A", {"0", "1"}, true, Role::Action},
                                     {"C", {"0", "1"}, true, Role::Plain},
                                     {"B", {"0", "1"}, false, Role::Reward}};
  PartialAssignment bad{{"C", "0"}};
  CHECK_THROWS_AS(
      Ldag::create(vars3, {{"A", "B", {bad}}, {"C", "A", {}}}, {}),
      InputError);
  // fine once C -> B exists
  CHECK_NOTHROW(
      Ldag::create(vars3, {{"A", "B", {bad}}, {"C", "B", {}}, {"C", "A", {}}},
                   {"C"}));

  // cycles rejected
  CHECK_THROWS_AS(
      Ldag::create(vars3, {{"A", "B", {}}, {"B", "C", {}}, {"C", "A", {}}},
                   {}),
      InputError);

  // policy scope must avoid descendants of the action
  CHECK_THROWS_AS(
      Ldag::create(vars3, {{"A", "B", {}}, {"A", "C", {}}}, {"C"}),
      InputError);
}

TEST_CASE("context variables collect exactly the labeled bindings") {
  CHECK(context_variables(scenarios::driving_traffic_context()) ==
        std::vector<std::string>{"T"});
  CHECK(context_variables(scenarios::driving_cruise_control()).empty());
  CHECK(context_variables(scenarios::mediated_context_pair()) ==
        std::vector<std::string>{"Z", "T"});
}

TEST_CASE("context-induced subgraph reproduces the worked constructions") {
  Ldag g = scenarios::mediated_context_pair();

  SUBCASE("binding only Z") {
    Ldag gw = context_induced_subgraph(g, {{"Z", "1"}});
    // the label Z=0 was incompatible: dropped, edge kept unlabeled
    CHECK(has_edge(gw, "U", "X"));
    CHECK(gw.edge("U", "X")->labels.empty());
    // edges incident to Z removed
    CHECK_FALSE(has_edge(gw, "Z", "X"));
    // the T=0 label survives
    REQUIRE(gw.edge("X", "Y") != nullptr);
    CHECK(gw.edge("X", "Y")->labels.size() == 1);
    CHECK(has_edge(gw, "X", "S"));
    CHECK(has_edge(gw, "U", "S"));
    CHECK(has_edge(gw, "S", "Y"));
    CHECK(has_edge(gw, "T", "Y"));
    CHECK(gw.edges().size() == 6);
  }

  SUBCASE("binding T and Z") {
    Ldag gw = context_induced_subgraph(g, {{"T", "0"}, {"Z", "1"}});
    // X->Y is absent in this context (its label is implied)
    CHECK_FALSE(has_edge(gw, "X", "Y"));
    CHECK_FALSE(has_edge(gw, "T", "Y"));
    CHECK_FALSE(has_edge(gw, "Z", "X"));
    CHECK(has_edge(gw, "X", "S"));
    CHECK(has_edge(gw, "U", "X"));
    CHECK(has_edge(gw, "U", "S"));
    CHECK(has_edge(gw, "S", "Y"));
    CHECK(gw.edges().size() == 4);
    CHECK(label_count(gw) == 0);
  }

  SUBCASE("empty context is the identity") {
    Ldag gw = context_induced_subgraph(g, {});
    CHECK(gw.edges().size() == g.edges().size());
    CHECK(label_count(gw) == label_count(g));
  }

  SUBCASE("binding a non-context variable is a domain error") {
    CHECK_THROWS_AS(context_induced_subgraph(g, {{"S", "0"}}), InputError);
  }

  SUBCASE("full context erases every label") {
    Ldag gw = context_induced_subgraph(g, {{"Z", "0"}, {"T", "1"}});
    CHECK(label_count(gw) == 0);
  }
}

TEST_CASE("context-specific DAG keeps context-incident edges") {
  Ldag g = scenarios::sales_chain();

  SUBCASE("C=0 drops the recession-labeled source edge only") {
    Ldag gc = context_specific_dag(g, {{"C", "0"}});
    CHECK_FALSE(has_edge(gc, "U3", "S"));     // label C=0 implied
    CHECK(has_edge(gc, "S", "W"));            // label C=1 incompatible: kept
    CHECK(gc.edge("S", "W")->labels.empty());
    CHECK(has_edge(gc, "C", "W"));            // context-incident edges stay
    CHECK(has_edge(gc, "C", "S"));
    CHECK(gc.edges().size() == g.edges().size() - 1);
  }

  SUBCASE("C=1 drops the expansion-labeled chain edge only") {
    Ldag gc = context_specific_dag(g, {{"C", "1"}});
    CHECK_FALSE(has_edge(gc, "S", "W"));
    CHECK(has_edge(gc, "U3", "S"));
    CHECK(gc.edge("U3", "S")->labels.empty());
    CHECK(gc.edges().size() == g.edges().size() - 1);
  }

  SUBCASE("unlabeled DAG is untouched") {
    Ldag plain = strip_labels(g);
    CHECK(context_specific_dag(plain, {}).edges().size() == plain.edges().size());
  }
}

TEST_CASE("mutilation deletes exactly the requested edge families") {
  Ldag g = scenarios::driving_confounded();
  Ldag cut = mutilate(g, {}, {"X"});
  CHECK_FALSE(has_edge(cut, "X", "Y"));
  CHECK(has_edge(cut, "S", "X"));
  CHECK(cut.edges().size() == g.edges().size() - 1);

  Ldag same = mutilate(g, {}, {});
  CHECK(same.edges().size() == g.edges().size());

  std::vector<VariableDecl> vars = {{"A", {"0", "1"}, true, Role::Action},
                                    {"B", {"0", "1"}, true, Role::Plain},
                                    {"C", {"0", "1"}, false, Role::Reward}};
  Ldag chain = Ldag::create(
      vars, {{"A", "B", {}}, {"B", "C", {}}, {"A", "C", {}}}, {});
  Ldag cut2 = mutilate(chain, {"B"}, {});
  CHECK_FALSE(has_edge(cut2, "A", "B"));
  CHECK(has_edge(cut2, "B", "C"));
}

TEST_CASE("context-induced subgraphs shrink and isolate, on random graphs") {
  CensusConfig cfg;
  cfg.n = 12;
  cfg.max_degree = 5;
  cfg.num_context_vars = 2;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Ldag g = random_ldag(cfg, 3200 + seed);
    auto ctx = context_variables(g);
    if (ctx.empty()) continue;

    // full contexts turn the graph into a plain DAG
    PartialAssignment full;
    for (const auto& name : ctx) full.bind(name, "0");
    Ldag gw = context_induced_subgraph(g, full);
    CHECK(label_count(gw) == 0);

    std::set<std::pair<std::string, std::string>> original;
    for (const auto& e : g.edges()) original.insert({e.from, e.to});
    for (const auto& e : gw.edges()) {
      CHECK(original.count({e.from, e.to}));
      CHECK_FALSE(full.binds(e.from));
      CHECK_FALSE(full.binds(e.to));
    }
  }
}

TEST_CASE("graph JSON round-trips byte-stably") {
  for (const Ldag& g :
       {scenarios::driving_confounded(), scenarios::mediated_context_pair(),
        scenarios::sales_chain(), scenarios::pricing_six_variable()}) {
    std::string once = serialize_ldag_json(g);
    Ldag parsed = parse_ldag_json(once);
    std::string twice = serialize_ldag_json(parsed);
    CHECK(once == twice);
  }
}

TEST_CASE("JSON parse errors carry context") {
  CHECK_THROWS_AS(parse_ldag_json("{"), InputError);
  CHECK_THROWS_AS(parse_ldag_json("{\"variables\": 3}"), InputError);
  try {
    parse_ldag_json("{\"variables\": [");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("JSON") != std::string::npos);
  }
}
