// dieroll: validate scenarios, run them, and pick n for a target alpha.
//
// Exit codes: 0 success, 1 usage, 2 invalid configuration, 3 security check
// failed, 4 causality (or lab access) violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "dieroll/analysis.hpp"
#include "dieroll/scenario.hpp"

namespace {

using namespace dieroll;

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kInsecure = 3, kCausality = 4 };

struct RunOptions {
  std::string scenario;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool exact_only = false;
  bool mc_only = false;
  std::string report;
  std::string transcript;
  std::string plot;
  bool confirm_receipt = false;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << text;
}

std::string fmt_probs(const std::vector<double>& p) {
  return fmt::format("[{:.6f}]", fmt::join(p, ", "));
}

int cmd_validate(const std::string& path) {
  const ScenarioSpec spec = load_scenario_spec(path);
  const auto problems = validate_scenario(spec);
  for (const auto& p : problems) fmt::print(stderr, "{}: {}\n", path, p);
  if (!problems.empty()) return kConfig;
  const Scenario sc = build_scenario(spec);
  const auto bound = security_bound(sc.params());
  fmt::print("{}: ok (M={}, n={}, N={}, alpha={:.6g}, delta={:.6g})\n", path,
             sc.params().parties(), sc.params().modulus(), sc.params().outcomes(), bound.alpha,
             bound.delta);
  return kOk;
}

void run_single(const Scenario& sc, const RunOptions& opt, std::uint64_t trials,
                std::uint64_t seed, AnalysisReport& rep) {
  const auto& inst = sc.instances.front();
  if (!opt.mc_only) {
    try {
      rep.exact = exact_outcome_distribution(inst.params, inst.roles);
      rep.exact_verdict = check_security(*rep.exact, *inst.params);
      fmt::print("exact P(o)      {}  abort probability {:.6g}\n", fmt_probs(rep.exact->probs),
                 rep.exact->abort_probability);
      fmt::print("exact verdict   {}\n", rep.exact_verdict->describe());
    } catch (const EnumerationLimit& e) {
      rep.notes.push_back(fmt::format("exact oracle skipped: {}", e.what()));
      fmt::print("exact oracle skipped: {}\n", e.what());
    }
  }
  if (!opt.exact_only) {
    rep.empirical = monte_carlo(inst.params, inst.roles, trials, {seed, opt.workers});
    rep.empirical_verdict = check_security(*rep.empirical, *inst.params);
    fmt::print("empirical P(o)  {}  ({} runs, {} aborted)\n",
               fmt_probs(rep.empirical->empirical()), rep.empirical->runs(),
               rep.empirical->aborted);
    fmt::print("sampled verdict {}\n", rep.empirical_verdict->describe());
    if (rep.exact && rep.empirical->trials > 0) {
      rep.kl_to_exact = kl_divergence(rep.empirical->empirical(), rep.exact->probs);
    }
  }
}

void run_parallel(const Scenario& sc, const RunOptions& opt, std::uint64_t trials,
                  std::uint64_t seed, AnalysisReport& rep) {
  const auto& second = *sc.instances[1].params;
  if (!opt.mc_only) {
    try {
      rep.exact_joint = exact_joint_distribution(sc.instances);
      rep.exact_independence = independence_test(*rep.exact_joint);
      auto first = check_security(rep.exact_joint->row_marginal(), sc.params());
      auto other = check_security(rep.exact_joint->col_marginal(), second);
      rep.exact_verdict = first.pass ? other : first;
      fmt::print("exact joint (o, o')\n");
      for (std::size_t a = 0; a < rep.exact_joint->rows; ++a) {
        std::vector<double> row;
        for (std::size_t b = 0; b < rep.exact_joint->cols; ++b) row.push_back(rep.exact_joint->at(a, b));
        fmt::print("  {}\n", fmt_probs(row));
      }
      fmt::print("exact mutual information {:.6g} bits, product gap {:.3g} -> {}\n",
                 rep.exact_independence->mutual_information_bits,
                 rep.exact_independence->max_product_gap,
                 rep.exact_independence->independent ? "independent" : "dependent");
      fmt::print("exact marginals verdict {}\n", rep.exact_verdict->describe());
    } catch (const EnumerationLimit& e) {
      rep.notes.push_back(fmt::format("exact oracle skipped: {}", e.what()));
      fmt::print("exact oracle skipped: {}\n", e.what());
    }
  }
  if (!opt.exact_only) {
    rep.joint = monte_carlo_joint(sc.instances, trials, {seed, opt.workers});
    auto first = check_security(rep.joint->marginals[0], sc.params());
    auto other = check_security(rep.joint->marginals[1], second);
    rep.empirical_verdict = first.pass ? other : first;
    rep.empirical = rep.joint->marginals[0];
    std::uint64_t equal = 0;
    for (std::size_t o = 0; o < std::min(rep.joint->rows, rep.joint->cols); ++o) {
      equal += rep.joint->at(o, o);
    }
    fmt::print("paired runs {} without abort, {} aborted, o = o' in {}\n", rep.joint->trials,
               rep.joint->aborted, equal);
    try {
      rep.empirical_independence = independence_test(*rep.joint);
      fmt::print("chi-squared {:.6g} (dof {}), p = {:.3g}, mutual information {:.6g} bits -> {}\n",
                 rep.empirical_independence->chi_squared, rep.empirical_independence->dof,
                 rep.empirical_independence->p_value,
                 rep.empirical_independence->mutual_information_bits,
                 rep.empirical_independence->independent ? "independent" : "dependent");
    } catch (const InsufficientSamples& e) {
      rep.notes.push_back(fmt::format("independence test skipped: {}", e.what()));
    }
    fmt::print("sampled marginals verdict {}\n", rep.empirical_verdict->describe());
  }
}

int cmd_run(const RunOptions& opt) {
  ScenarioSpec spec = load_scenario_spec(opt.scenario);
  if (opt.confirm_receipt) spec.timing.confirm_receipt = true;
  if (opt.trials) spec.trials = *opt.trials;
  if (opt.seed) spec.seed = *opt.seed;
  if (spec.trials == 0) throw ScenarioError("trials must be >= 1");
  const Scenario sc = build_scenario(spec);

  AnalysisReport rep;
  rep.scenario = sc.name;
  rep.seed = sc.seed;
  rep.params = sc.instances.front().params;
  for (const auto& names : sc.role_names) {
    rep.strategies.push_back(fmt::format("{}", fmt::join(names, ",")));
  }
  rep.bound = security_bound(sc.params());
  rep.attacks = sc.attacks;

  fmt::print("scenario {}: M={} n={} N={} alpha={:.6g} delta={:.6g}\n", sc.name,
             sc.params().parties(), sc.params().modulus(), sc.params().outcomes(),
             rep.bound.alpha, rep.bound.delta);
  fmt::print("ideal P_o       {}\n", fmt_probs(sc.params().partition().ideal().probs()));
  for (const auto& a : sc.attacks) {
    fmt::print("{} shift attack on party {}: target {}, shift {}, achieves {:.12g}, bound {:.12g}\n",
               a.minimizing ? "minimizing" : "maximizing", a.honest_party + 1, a.target, a.shift,
               a.achieved, a.bound);
  }

  if (!opt.transcript.empty()) {
    StreamRandomness randomness(derive_seed(sc.seed, 0));
    const auto result = run_session(sc.instances, randomness);
    std::string text;
    for (const auto& t : result.transcripts) text += serialize_transcript(t);
    text += serialize_event_log(result.state);
    write_file(opt.transcript, text);
  }

  if (sc.instances.size() == 1) {
    run_single(sc, opt, sc.trials, sc.seed, rep);
  } else {
    run_parallel(sc, opt, sc.trials, sc.seed, rep);
  }

  if (!opt.report.empty()) write_file(opt.report, render_report(rep));
  if (!opt.plot.empty()) write_file(opt.plot, plot_data(rep));
  fmt::print("result: {}\n", rep.pass() ? "PASS" : "FAIL");
  return rep.pass() ? kOk : kInsecure;
}

int cmd_suggest(const std::string& dist_text, double alpha, std::size_t max_n) {
  std::vector<std::string> terms;
  std::stringstream ss(dist_text);
  for (std::string t; std::getline(ss, t, ',');) terms.push_back(t);
  const auto dist = parse_distribution(terms);
  const auto s = suggest_n(dist, alpha, max_n);
  fmt::print("n = {}  alpha' = {:.6g}\n", s.n, s.alpha);
  return kOk;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("DIEROLL_WORKERS")) {
    try {
      return std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic multi-party die rolling: scenario validation, runs and analysis"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario's layout, partition and sources");
  validate->add_option("scenario", validate_path, "Scenario YAML file")->required();

  RunOptions run;
  run.workers = default_workers();
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and check the security bound");
  run_cmd->add_option("scenario", run.scenario, "Scenario YAML file")->required();
  run_cmd->add_option("--trials", run.trials, "Monte Carlo runs (overrides the scenario)");
  run_cmd->add_option("--seed", run.seed, "Base seed (overrides the scenario)");
  run_cmd->add_option("--workers", run.workers, "Worker threads (default $DIEROLL_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  auto* exact = run_cmd->add_flag("--exact", run.exact_only, "Exact enumeration only");
  auto* mc = run_cmd->add_flag("--monte-carlo", run.mc_only, "Monte Carlo only");
  exact->excludes(mc);
  run_cmd->add_option("--report", run.report, "Write the JSON report here");
  run_cmd->add_option("--transcript", run.transcript, "Write the first run's transcript here");
  run_cmd->add_option("--plot-data", run.plot, "Write outcome/deviation/delta TSV here");
  run_cmd->add_flag("--confirm-receipt", run.confirm_receipt,
                    "Copies of m_k are confirmed back to L_kk");

  std::string dist;
  double alpha = 0.0;
  std::size_t max_n = 10'000'000;
  auto* suggest = app.add_subcommand("suggest-n", "Smallest n realizing a target alpha");
  suggest->add_option("--dist", dist, "Comma-separated P_o, e.g. '1/pi,rest'")->required();
  suggest->add_option("--alpha", alpha, "Target alpha (0 needs rational P_o)")->required();
  suggest->add_option("--max-n", max_n, "Scan limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*run_cmd) return cmd_run(run);
    if (*suggest) return cmd_suggest(dist, alpha, max_n);
  } catch (const CausalityViolation& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kCausality;
  } catch (const AccessViolation& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kCausality;
  } catch (const ScenarioError& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kConfig;
  } catch (const TimingInfeasible& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}
