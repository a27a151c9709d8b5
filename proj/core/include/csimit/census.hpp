#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csimit/generators.hpp"

namespace csimit {

struct CensusRow {
  int n = 0;
  std::uint64_t seed = 0;
  bool classic_imitable = false;
  bool csi_imitable = false;
  std::uint64_t contexts_checked = 0;
  double wall_ms = 0.0;
  std::string error;
};

struct CensusResult {
  CensusConfig base;
  std::vector<int> ns;
  std::vector<CensusRow> rows;  // ordered by (n, seed)
};

/// For each n and each of `base.samples` seeds: one random LDAG, the classic
/// decision on the label-stripped graph, and the per-context CSI decision.
/// Per-instance resource errors are recorded in the row, not fatal.
CensusResult run_census(const CensusConfig& base, const std::vector<int>& ns,
                        unsigned threads = 1);

std::string census_csv(const CensusResult& r);
std::string census_summary(const CensusResult& r);
std::string census_plot_data(const CensusResult& r);  // n fraction pairs

}  // namespace csimit
