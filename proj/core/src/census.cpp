#include "csimit/census.hpp"

#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"
#include "csimit/imitability.hpp"

namespace csimit {

namespace {

CensusRow run_instance(const CensusConfig& cfg, std::uint64_t seed) {
  CensusRow row;
  row.n = cfg.n;
  row.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Ldag g = random_ldag(cfg, seed);

    Ldag plain = strip_labels(g);
    row.classic_imitable = find_sep(plain).has_value();

    auto results = corollary1_check(g);
    row.contexts_checked = results.size();
    row.csi_imitable = true;
    for (const auto& r : results) {
      if (!r.separator) {
        row.csi_imitable = false;
        break;
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

}  // namespace

CensusResult run_census(const CensusConfig& base, const std::vector<int>& ns,
                        unsigned threads) {
  CensusResult out;
  out.base = base;
  out.ns = ns;

  struct Job {
    CensusConfig cfg;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int n : ns) {
    CensusConfig cfg = base;
    cfg.n = n;
    for (int i = 0; i < base.samples; ++i) {
      jobs.push_back({cfg, base.seed + static_cast<std::uint64_t>(i)});
    }
  }
  out.rows.resize(jobs.size());

  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      out.rows[i] = run_instance(jobs[i].cfg, jobs[i].seed);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        out.rows[i] = run_instance(jobs[i].cfg, jobs[i].seed);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::string census_csv(const CensusResult& r) {
  std::ostringstream os;
  os << "n,seed,classic_imitable,csi_imitable,contexts_checked,wall_ms\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << row.seed << ',' << (row.classic_imitable ? 1 : 0)
       << ',' << (row.csi_imitable ? 1 : 0) << ',' << row.contexts_checked
       << ',' << row.wall_ms;
    if (!row.error.empty()) os << ",error=" << row.error;
    os << '\n';
  }
  return os.str();
}

namespace {

struct Fractions {
  double classic = 0.0;
  double csi = 0.0;
  int count = 0;
};

std::map<int, Fractions> fractions_by_n(const CensusResult& r) {
  std::map<int, Fractions> by_n;
  for (const auto& row : r.rows) {
    if (!row.error.empty()) continue;
    auto& f = by_n[row.n];
    f.classic += row.classic_imitable ? 1.0 : 0.0;
    f.csi += row.csi_imitable ? 1.0 : 0.0;
    ++f.count;
  }
  for (auto& [n, f] : by_n) {
    if (f.count > 0) {
      f.classic /= f.count;
      f.csi /= f.count;
    }
  }
  return by_n;
}

}  // namespace

std::string census_summary(const CensusResult& r) {
  std::ostringstream os;
  os << "n  instances  classic_fraction  csi_fraction  gap\n";
  for (const auto& [n, f] : fractions_by_n(r)) {
    os << n << "  " << f.count << "  " << f.classic << "  " << f.csi << "  "
       << (f.csi - f.classic) << '\n';
  }
  return os.str();
}

std::string census_plot_data(const CensusResult& r) {
  std::ostringstream os;
  os << "n classic csi\n";
  for (const auto& [n, f] : fractions_by_n(r)) {
    os << n << ' ' << f.classic << ' ' << f.csi << '\n';
  }
  return os.str();
}

}  // namespace csimit
