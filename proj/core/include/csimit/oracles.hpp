#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csimit/generators.hpp"
#include "csimit/ldag.hpp"
#include "csimit/policy.hpp"
#include "csimit/scm.hpp"

namespace csimit::oracles {

struct OracleReport {
  struct Mismatch {
    std::string instance;
    std::string expected;
    std::string got;
  };
  std::uint64_t checked = 0;
  std::vector<Mismatch> mismatches;

  bool pass() const { return mismatches.empty(); }
  std::string to_json() const;
};

/// Ground-truth d-separation by enumerating every undirected path and
/// applying the collider/non-collider blocking rules. |V| <= 12.
bool dsep_by_paths(const Ldag& g, const std::set<std::string>& x_set,
                   const std::set<std::string>& y_set,
                   const std::set<std::string>& z_set);

/// max_y |P(y|do(pi)) - P(y)| <= tol, computed with a truncated-factorization
/// enumerator that shares no code with the production engine.
bool verify_policy(const DiscreteScm& m, const PolicyTable& pi, double tol);
double policy_gap(const DiscreteScm& m, const PolicyTable& pi);

struct AdversarialResult {
  double best_gap = 0.0;       // max over models of the best-policy gap
  std::uint64_t best_trial = 0;
  std::uint64_t trials = 0;
  std::optional<DiscreteScm> best_model;
};

/// Random and parity-patterned SCMs compatible with the LDAG; for each, the
/// reward gap is minimized over a policy grid (plus the backdoor policy when
/// one exists). Evidence for non-imitability, not proof.
AdversarialResult adversarial_scm_search(const Ldag& g, int trials,
                                         std::uint64_t seed);

/// Truth-table satisfiability, k <= 20.
bool exhaustive_sat(const CnfFormula& f);

OracleReport run_dsep_suite(int graphs, int queries_per_graph,
                            std::uint64_t seed);
OracleReport run_policy_suite(int trials, std::uint64_t seed);
OracleReport run_sat_suite(int instances, std::uint64_t seed);

}  // namespace csimit::oracles
