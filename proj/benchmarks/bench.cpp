#include <benchmark/benchmark.h>

#include "csimit/census.hpp"
#include "csimit/dsep.hpp"
#include "csimit/generators.hpp"
#include "csimit/imitability.hpp"
#include "csimit/scenarios.hpp"
#include "csimit/scm.hpp"

namespace {

void BM_DSeparation(benchmark::State& state) {
  csimit::CensusConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  csimit::Ldag g = csimit::random_ldag(cfg, 7);
  std::set<std::string> x{g.action_name()};
  std::set<std::string> y{g.reward_name()};
  std::set<std::string> z(g.policy_scope().begin(), g.policy_scope().end());
  z.erase(g.action_name());
  z.erase(g.reward_name());
  for (auto _ : state) {
    benchmark::DoNotOptimize(csimit::d_separated(g, x, y, z));
  }
}
BENCHMARK(BM_DSeparation)->Arg(100)->Arg(200);

void BM_Corollary1(benchmark::State& state) {
  csimit::CensusConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  csimit::Ldag g = csimit::random_ldag(cfg, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csimit::corollary1_check(g));
  }
}
BENCHMARK(BM_Corollary1)->Arg(50)->Arg(100)->Arg(150);

void BM_JointEnumeration(benchmark::State& state) {
  csimit::CensusConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.max_degree = 3;
  csimit::Ldag g = csimit::random_ldag(cfg, 3);
  csimit::DiscreteScm m = csimit::random_scm_for_ldag(g, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csimit::joint_distribution(m));
  }
}
BENCHMARK(BM_JointEnumeration)->Arg(10)->Arg(14);

void BM_FindMinSep(benchmark::State& state) {
  csimit::Ldag g = csimit::scenarios::sales_chain();
  csimit::Ldag gc = csimit::context_specific_dag(
      g, csimit::PartialAssignment{{"C", "0"}});
  csimit::Ldag gcpi = csimit::add_policy_edges(gc);
  std::set<std::string> allowed{"T", "S", "W", "C"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        csimit::find_min_sep(gcpi, "X", "Y", {"C"}, allowed));
  }
}
BENCHMARK(BM_FindMinSep);

}  // namespace

BENCHMARK_MAIN();
