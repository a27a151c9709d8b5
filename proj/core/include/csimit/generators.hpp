#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "csimit/ldag.hpp"
#include "csimit/scm.hpp"

namespace csimit {

struct CensusConfig {
  int n = 100;
  int max_degree = 0;  // 0: n/10, floored at 2
  double latent_prob = 1.0 / 6.0;
  int num_context_vars = 3;
  double label_prob = 0.5;
  int samples = 100;
  std::uint64_t seed = 0;

  int degree_cap() const;
};

/// Random labeled DAG: degree-capped random DAG, latent vertices, action with
/// a reachable reward, context variables among observed roots (so the
/// context set is ancestrally closed), one label per eligible edge with the
/// configured probability. Deterministic per seed.
Ldag random_ldag(const CensusConfig& cfg, std::uint64_t seed);

/// Random SCM compatible with the LDAG: Dirichlet(1) CPT rows, with rows tied
/// together wherever an edge label demands local context-specific
/// independence, so validate_csi passes by construction.
DiscreteScm random_scm_for_ldag(const Ldag& g, std::uint64_t seed);

struct CnfFormula {
  int num_vars = 0;
  std::vector<std::array<int, 3>> clauses;  // signed 1-based variable indices

  static CnfFormula parse_dimacs(const std::string& text);
  std::string to_dimacs() const;
  void validate() const;  // 3 distinct literals over distinct variables
};

/// Reduction from 3-SAT to the imitability decision: the target distribution
/// is imitable iff the formula is unsatisfiable.
Ldag sat_to_ldag(const CnfFormula& f);

}  // namespace csimit
