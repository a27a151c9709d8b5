#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csimit/policy.hpp"

namespace csimit {

struct PolicyMetrics {
  std::string name;
  std::string decision;          // for the data-driven algorithm
  double expected_reward = 0.0;
  double reward_kl = 0.0;        // KL(P(Y) || P(Y | do(pi)))
  // per policy-row KL between the exact policy and its finite-sample
  // re-estimate (sampled mode only), keyed by the row assignment
  std::map<std::string, double> estimation_kl;
  PolicyTable policy;
};

struct ExperimentReport {
  std::string header;
  bool exact = true;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double expert_expected_reward = 0.0;
  std::vector<double> expert_reward_dist;
  std::vector<PolicyMetrics> algorithms;
  double runtime_ms = 0.0;
  std::vector<std::string> notes;

  std::string to_json() const;
  std::string to_text() const;
};

/// Policy comparison on the six-variable pricing model: the expert, two
/// naive baselines (marginal cloning and parent-conditional cloning), and
/// the data-driven context-specific algorithm. Exact mode evaluates policies
/// built from exact tables; sampled mode re-estimates every policy from
/// n_samples draws first and reports per-row estimation divergences.
ExperimentReport run_table1(std::uint64_t n_samples, std::uint64_t seed,
                            bool exact);

}  // namespace csimit
