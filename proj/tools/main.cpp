// csimit: decide imitability of labeled causal DAGs, synthesize imitating
// policies, and run the bundled experiments and brute-force oracle suites.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csimit/census.hpp"
#include "csimit/dsep.hpp"
#include "csimit/errors.hpp"
#include "csimit/experiments.hpp"
#include "csimit/generators.hpp"
#include "csimit/imitability.hpp"
#include "csimit/oracles.hpp"
#include "csimit/scenarios.hpp"
#include "csimit/scm.hpp"
#include "csimit/surrogate.hpp"

namespace {

constexpr int kExitBadInput = 64;
constexpr int kExitInternal = 70;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw csimit::InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw csimit::InputError("cannot open '" + path + "' for writing");
  out << text;
}

csimit::JointTable observed_joint(const csimit::DiscreteScm& m,
                                  std::uint64_t cap) {
  return csimit::joint_distribution(m, cap)
      .marginal(m.graph().observed_names());
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool json = false;
  unsigned threads = 1;
  std::uint64_t cap_states = csimit::kDefaultStateCap;
};

int cmd_decide(const GlobalOpts& opt, const std::string& graph_path,
               const std::string& obs_path) {
  csimit::Ldag g = csimit::parse_ldag_json(read_input(graph_path));
  std::optional<csimit::JointTable> obs;
  if (!obs_path.empty()) {
    auto m = csimit::parse_scm_json(read_input(obs_path));
    obs = observed_joint(m, opt.cap_states);
  }
  csimit::DecisionOptions dopt;
  dopt.threads = opt.threads;
  auto verdict = csimit::imitate1(g, obs, dopt);
  std::cout << csimit::serialize_verdict_json(verdict) << '\n';
  return csimit::decision_exit_code(verdict.decision);
}

int cmd_imitate(const GlobalOpts& opt, const std::string& graph_path,
                const std::string& scm_path, std::uint64_t samples,
                bool adversarial_evidence) {
  csimit::Ldag g = csimit::parse_ldag_json(read_input(graph_path));
  auto m = csimit::parse_scm_json(read_input(scm_path));
  {
    auto violations = csimit::validate_csi(m);
    if (!violations.empty()) {
      std::cerr << "warning: the model violates " << violations.size()
                << " edge-label independence(s); results may be meaningless\n";
    }
  }
  csimit::JointTable obs;
  if (samples > 0) {
    auto data = csimit::sample(m, samples, opt.seed);
    obs = csimit::estimate_joint(data, m.graph().observed_names());
  } else {
    obs = observed_joint(m, opt.cap_states);
  }
  csimit::Imitate2Options iopt;
  iopt.threads = opt.threads;
  auto result = csimit::imitate2(g, obs, iopt);
  if (result.verdict.decision == csimit::Decision::Unknown &&
      adversarial_evidence) {
    auto adv = csimit::oracles::adversarial_scm_search(g, 200, opt.seed);
    result.verdict.notes.push_back(
        "adversarial search: best-policy gap " +
        std::to_string(adv.best_gap) + " over " +
        std::to_string(adv.trials) + " models (evidence, not proof)");
  }
  std::cout << csimit::serialize_imitate2_json(result) << '\n';
  return csimit::decision_exit_code(result.verdict.decision);
}

int cmd_census(const GlobalOpts& opt, csimit::CensusConfig cfg,
               std::vector<int> ns, const std::string& out_path,
               const std::string& plot_path) {
  cfg.seed = opt.seed;
  if (ns.empty()) ns = {50, 100, 150};
  auto result = csimit::run_census(cfg, ns, opt.threads);
  write_output(out_path, csimit::census_csv(result));
  if (!plot_path.empty()) {
    write_output(plot_path, csimit::census_plot_data(result));
  }
  std::cerr << csimit::census_summary(result);
  return 0;
}

int cmd_table1(const GlobalOpts& opt, std::uint64_t samples, bool sampled) {
  auto report = csimit::run_table1(samples, opt.seed, !sampled);
  if (opt.json) {
    std::cout << report.to_json() << '\n';
  } else {
    std::cout << report.to_text();
  }
  return 0;
}

int cmd_satgen(const std::string& cnf_path, const std::string& out_path) {
  auto f = csimit::CnfFormula::parse_dimacs(read_input(cnf_path));
  auto g = csimit::sat_to_ldag(f);
  write_output(out_path, csimit::serialize_ldag_json(g));
  return 0;
}

int cmd_validate(const GlobalOpts& opt, const std::string& scm_path,
                 const std::string& graph_path) {
  auto m = csimit::parse_scm_json(read_input(scm_path));
  if (!graph_path.empty()) {
    auto g = csimit::parse_ldag_json(read_input(graph_path));
    if (csimit::serialize_ldag_json(g) !=
        csimit::serialize_ldag_json(m.graph())) {
      std::cerr << "error: the model's graph differs from --graph\n";
      return kExitBadInput;
    }
  }
  auto violations = csimit::validate_csi(m);
  nlohmann::ordered_json j;
  j["csi_violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) {
    j["csi_violations"].push_back({{"edge", v.from + "->" + v.to},
                                   {"label", v.label.to_key()},
                                   {"row_a", v.row_a},
                                   {"row_b", v.row_b},
                                   {"max_gap", v.max_gap}});
  }
  j["notes"] = m.notes();
  (void)opt;
  std::cout << j.dump(2) << '\n';
  return violations.empty() ? 0 : 1;
}

int cmd_oracle(const GlobalOpts& opt, const std::string& suite, int trials) {
  csimit::oracles::OracleReport report;
  if (suite == "dsep") {
    report = csimit::oracles::run_dsep_suite(trials, 20, opt.seed);
  } else if (suite == "policy") {
    report = csimit::oracles::run_policy_suite(trials, opt.seed);
  } else if (suite == "sat") {
    report = csimit::oracles::run_sat_suite(trials, opt.seed);
  } else {
    throw csimit::InputError("unknown oracle suite '" + suite +
                             "' (dsep|policy|sat)");
  }
  std::cout << report.to_json() << '\n';
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "imitability of labeled causal DAGs: decisions, policies, experiments"};
  app.require_subcommand(1);

  GlobalOpts opt;
  app.add_option("--seed", opt.seed, "global random seed");
  app.add_flag("--json", opt.json, "machine-readable output where applicable");
  app.add_option("--threads", opt.threads, "worker threads for per-context checks");
  app.add_option("--cap-states", opt.cap_states,
                 "joint state-space cap for exact enumeration");

  std::string graph_path, obs_path, scm_path, cnf_path;
  std::string out_path, plot_path;
  std::uint64_t samples = 0;
  bool sampled = false;
  bool adversarial = false;
  int trials = 100;
  std::string suite;
  csimit::CensusConfig census_cfg;
  std::vector<int> census_ns;

  auto* decide = app.add_subcommand("decide", "graphical imitability decision");
  decide->add_option("--graph", graph_path, "LDAG JSON (or - for stdin)")
      ->required();
  decide->add_option("--obs", obs_path, "SCM JSON for the policy tables");

  auto* imitate =
      app.add_subcommand("imitate", "data-driven imitation (surrogates)");
  imitate->add_option("--graph", graph_path, "LDAG JSON (or - for stdin)")
      ->required();
  imitate->add_option("--scm", scm_path, "SCM JSON supplying P(O)")->required();
  imitate->add_option("--samples", samples,
                      "estimate P(O) from this many draws instead of exact "
                      "enumeration");
  imitate->add_flag("--adversarial-evidence", adversarial,
                    "on unknown verdicts, search for adversarial models");

  auto* census = app.add_subcommand(
      "census", "fraction of imitable random graphs, classic vs with labels");
  census->add_option("--n", census_ns, "vertex counts (repeatable)");
  census->add_option("--samples", census_cfg.samples, "graphs per n");
  census->add_option("--max-degree", census_cfg.max_degree,
                     "degree cap (0: n/10)");
  census->add_option("--latent-prob", census_cfg.latent_prob,
                     "latent probability per vertex");
  census->add_option("--label-prob", census_cfg.label_prob,
                     "label probability per eligible edge");
  census->add_option("--num-context-vars", census_cfg.num_context_vars,
                     "context variables per graph");
  census->add_option("--out", out_path, "CSV output path (default stdout)");
  census->add_option("--plot-data", plot_path,
                     "write (n, fraction) pairs for plotting");

  auto* table1 = app.add_subcommand(
      "table1", "policy comparison on the pricing scenario");
  table1->add_option("--samples", samples,
                     "finite-sample mode with this many draws");
  table1->add_flag("--sampled", sampled,
                   "re-estimate policies from samples (default: exact)");

  auto* satgen =
      app.add_subcommand("satgen", "3-SAT instance to imitability LDAG");
  satgen->add_option("--cnf", cnf_path, "DIMACS CNF (or - for stdin)")
      ->required();
  satgen->add_option("--out", out_path, "LDAG JSON output (default stdout)");

  auto* validate =
      app.add_subcommand("validate", "check a model against its edge labels");
  validate->add_option("--scm", scm_path, "SCM JSON")->required();
  validate->add_option("--graph", graph_path, "cross-check against this LDAG");

  auto* oracle = app.add_subcommand("oracle", "brute-force reference suites");
  oracle->add_option("--suite", suite, "dsep | policy | sat")->required();
  oracle->add_option("--trials", trials, "instances to check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (decide->parsed()) return cmd_decide(opt, graph_path, obs_path);
    if (imitate->parsed()) {
      return cmd_imitate(opt, graph_path, scm_path, samples, adversarial);
    }
    if (census->parsed()) {
      return cmd_census(opt, census_cfg, census_ns, out_path, plot_path);
    }
    if (table1->parsed()) {
      if (sampled && samples == 0) samples = 100000;
      return cmd_table1(opt, samples, sampled);
    }
    if (satgen->parsed()) return cmd_satgen(cnf_path, out_path);
    if (validate->parsed()) return cmd_validate(opt, scm_path, graph_path);
    if (oracle->parsed()) return cmd_oracle(opt, suite, trials);
  } catch (const csimit::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const csimit::ResourceCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
