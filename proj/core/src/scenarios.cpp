#include "csimit/scenarios.hpp"

namespace csimit::scenarios {

namespace {

VariableDecl obs(const std::string& name, Role role = Role::Plain) {
  return {name, {"0", "1"}, true, role};
}

VariableDecl lat(const std::string& name, Role role = Role::Plain) {
  return {name, {"0", "1"}, false, role};
}

PartialAssignment label(const std::string& var, const std::string& value) {
  PartialAssignment a;
  a.bind(var, value);
  return a;
}

Ldag driving(bool limit_edge, bool with_traffic_label) {
  std::vector<VariableDecl> vars = {
      obs("Z"), obs("T"), lat("S"), obs("X", Role::Action),
      lat("Y", Role::Reward)};
  std::vector<LabeledEdge> edges = {
      {"Z", "X", {}}, {"Z", "T", {}}, {"Z", "S", {}}, {"Z", "Y", {}},
      {"T", "X", {}}, {"S", "Y", {}}, {"X", "Y", {}}};
  if (limit_edge) {
    LabeledEdge e{"S", "X", {}};
    if (with_traffic_label) e.labels.push_back(label("T", "1"));
    edges.push_back(std::move(e));
  }
  return Ldag::create(std::move(vars), std::move(edges), {"Z", "T"});
}

}  // namespace

Ldag driving_confounded() { return driving(true, false); }
Ldag driving_cruise_control() { return driving(false, false); }
Ldag driving_traffic_context() { return driving(true, true); }

Ldag mediated_context_pair() {
  std::vector<VariableDecl> vars = {obs("Z"),  lat("U"),
                                    obs("T"),  obs("X", Role::Action),
                                    obs("S"),  lat("Y", Role::Reward)};
  std::vector<LabeledEdge> edges = {
      {"Z", "X", {}},
      {"U", "X", {label("Z", "0")}},
      {"U", "S", {}},
      {"X", "S", {}},
      {"S", "Y", {}},
      {"T", "Y", {}},
      {"X", "Y", {label("T", "0")}}};
  return Ldag::create(std::move(vars), std::move(edges), {"Z", "T"});
}

Ldag pricing_recession() {
  std::vector<VariableDecl> vars = {obs("C"), lat("U"), obs("X", Role::Action),
                                    obs("S"), lat("Y", Role::Reward)};
  std::vector<LabeledEdge> edges = {{"C", "X", {}},
                                    {"U", "X", {label("C", "0")}},
                                    {"U", "S", {}},
                                    {"X", "S", {}},
                                    {"S", "Y", {}}};
  return Ldag::create(std::move(vars), std::move(edges), {"C"});
}

Ldag sales_chain() {
  std::vector<VariableDecl> vars = {
      obs("C"),  obs("T"),  lat("U1"), lat("U2"),
      lat("U3"), obs("X", Role::Action), obs("S"), obs("W"),
      lat("Y", Role::Reward)};
  std::vector<LabeledEdge> edges = {
      {"T", "X", {}},
      {"U1", "X", {label("T", "0")}},
      {"U1", "S", {}},
      {"X", "S", {}},
      {"C", "S", {}},
      {"U3", "S", {label("C", "0")}},
      {"S", "W", {label("C", "1")}},
      {"C", "W", {}},
      {"U2", "W", {}},
      {"W", "Y", {}},
      {"U2", "Y", {}},
      {"U3", "Y", {}}};
  return Ldag::create(std::move(vars), std::move(edges), {"C", "T"});
}

Ldag pricing_six_variable() {
  std::vector<VariableDecl> vars = {
      obs("C"), obs("T"), lat("U1"), obs("X", Role::Action), obs("S"),
      {"Y", {"0", "1", "2"}, false, Role::Reward}};
  std::vector<LabeledEdge> edges = {
      {"T", "X", {}},
      {"U1", "X", {label("T", "0")}},
      {"U1", "S", {}},
      {"X", "S", {}},
      {"C", "S", {}},
      {"C", "Y", {}},
      {"S", "Y", {label("C", "1")}}};
  return Ldag::create(std::move(vars), std::move(edges), {"C", "T"});
}

DiscreteScm pricing_six_variable_scm() {
  Ldag g = pricing_six_variable();
  std::vector<Cpt> cpts;
  cpts.push_back({"C", {}, {{0.95, 0.05}}});
  cpts.push_back({"T", {}, {{0.6, 0.4}}});
  cpts.push_back({"U1", {}, {{0.2, 0.8}}});
  // X | T, U1: the U1 rows coincide at T=0 (label T=0 on U1 -> X)
  cpts.push_back({"X",
                  {"T", "U1"},
                  {{0.3, 0.7},   // T=0, U1=0
                   {0.3, 0.7},   // T=0, U1=1
                   {1.0, 0.0},   // T=1, U1=0
                   {0.0, 1.0}}});  // T=1, U1=1
  // S | C, U1, X: S = 1{X == U1} when C=0; C=1 rows unspecified -> uniform
  cpts.push_back({"S",
                  {"C", "U1", "X"},
                  {{0.0, 1.0},   // C=0, U1=0, X=0
                   {1.0, 0.0},   // C=0, U1=0, X=1
                   {1.0, 0.0},   // C=0, U1=1, X=0
                   {0.0, 1.0},   // C=0, U1=1, X=1
                   {0.5, 0.5},
                   {0.5, 0.5},
                   {0.5, 0.5},
                   {0.5, 0.5}}});
  // Y | C, S: the S rows coincide at C=1 (label C=1 on S -> Y)
  cpts.push_back({"Y",
                  {"C", "S"},
                  {{0.8, 0.1, 0.1},     // C=0, S=0
                   {0.05, 0.2, 0.75},   // C=0, S=1
                   {0.2, 0.5, 0.3},     // C=1, S=0
                   {0.2, 0.5, 0.3}}});  // C=1, S=1
  return DiscreteScm::create(
      std::move(g), std::move(cpts),
      {"sales rows for C=1 are unspecified in the scenario; filled uniform"});
}

}  // namespace csimit::scenarios
