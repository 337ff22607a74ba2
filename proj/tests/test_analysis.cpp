#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dieroll/analysis.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace dieroll;

namespace {

std::shared_ptr<const ProtocolParams> attack_params() {
  return support::make_params(build_partition(IdealDistribution::uniform(2), 4), {0.05, 0.0},
                              support::simplex_layout(2));
}

std::vector<StrategyPtr> attack_roles(const ProtocolParams& params) {
  const auto source = SourceModel::tight({0.3, 0.3, 0.2, 0.2});
  return {honest_strategy(source), optimal_shift_attack(params, 0, source, 0).strategy};
}

}  // namespace

TEST_CASE("security bound examples", "[analysis]") {
  CHECK(security_bound(*support::unbiased_params(3, 6)).delta == 0.0);

  const auto half = IdealDistribution::uniform(2);
  const auto p = support::make_params(partition_from_sizes(half, {5, 5}, 0.01), {0.001, 0.001},
                                      support::simplex_layout(2));
  const auto b = security_bound(*p);
  CHECK(b.delta == Catch::Approx(0.015));
  CHECK(b.alpha == 0.01);
  CHECK(p->delta() == Catch::Approx(0.015));

  const auto q = support::make_params(unbiased_partition(4), {0.05, 0.0}, support::simplex_layout(2));
  CHECK(security_bound(*q).delta == Catch::Approx(0.05));
  CHECK(security_bound(*q).worst_party == 0);
}

TEST_CASE("distance helpers", "[analysis]") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75}, r{1.0, 0.0};
  CHECK(variational_distance(p, q) == Catch::Approx(0.25));
  CHECK(deviations(p, q) == std::vector<double>{0.25, 0.25});
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(p, q) == Catch::Approx(0.5 * std::log(2.0) + 0.5 * std::log(0.5 / 0.75)));
  CHECK(std::isinf(kl_divergence(p, r)));
  const std::vector<double> three{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(variational_distance(p, three), std::invalid_argument);
}

TEST_CASE("exact law of honest runs", "[analysis]") {
  const auto fair = exact_outcome_distribution(support::unbiased_params(2, 2), support::all_honest(2, 2));
  CHECK(fair.probs == std::vector<double>{0.5, 0.5});
  CHECK(fair.combinations == 4);

  const auto partition = build_partition(IdealDistribution({0.25, 0.75}), 4);
  const auto params = support::make_params(partition, {0.0, 0.0, 0.0}, support::simplex_layout(3));
  const auto exact = exact_outcome_distribution(params, support::all_honest(3, 4));
  CHECK(exact.probs[0] == 0.25);
  CHECK(exact.probs[1] == 0.75);
  CHECK(exact.max_deviation() == 0.0);
  CHECK(exact.abort_probability == 0.0);
  CHECK(check_security(exact, *params).pass);
}

TEST_CASE("formula route agrees with enumeration", "[analysis][property]") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const std::size_t m = 2 + trial % 2;
    std::vector<double> eps(m, 0.0);
    std::vector<StrategyPtr> roles;
    const auto adv = random_admissible(rng());
    for (std::size_t k = 0; k < m; ++k) {
      if (k == 0 || (m == 3 && k == 1 && trial % 4 == 0)) {
        const auto s = support::random_source(rng, n, 0.3 / n);
        eps[k] = s.epsilon();
        roles.push_back(honest_strategy(s));
      } else {
        roles.push_back(adv);
      }
    }
    const auto params = support::make_params(unbiased_partition(n), eps, support::simplex_layout(m));
    const auto exact = exact_outcome_distribution(params, roles);
    REQUIRE_FALSE(exact.formula.empty());
    for (const auto& [k, probs] : exact.formula) {
      REQUIRE(roles[k]->honest());
      for (std::size_t o = 0; o < n; ++o) REQUIRE(std::abs(probs[o] - exact.probs[o]) <= 1e-12);
    }
  }
}

TEST_CASE("the shift attack shows up in the exact law", "[analysis]") {
  const auto params = attack_params();
  const auto exact = exact_outcome_distribution(params, attack_roles(*params));
  CHECK(exact.probs[0] == Catch::Approx(0.6).margin(1e-12));
  CHECK(exact.max_deviation() == Catch::Approx(0.1).margin(1e-12));
  const auto v = check_security(exact, *params);
  CHECK(v.pass);
  CHECK(v.delta == Catch::Approx(0.1));
  CHECK(exact.p_max() == Catch::Approx(0.5 + 0.5 * exact.variational_distance()));
}

TEST_CASE("enumeration guard", "[analysis]") {
  ExactOptions tiny;
  tiny.max_combinations = 10;
  CHECK_THROWS_AS(exact_outcome_distribution(support::unbiased_params(3, 3), support::all_honest(3, 3), tiny),
                  EnumerationLimit);
  tiny.max_combinations = 27;
  CHECK_NOTHROW(exact_outcome_distribution(support::unbiased_params(3, 3), support::all_honest(3, 3), tiny));
}

TEST_CASE("constructed violation is caught with its witness", "[analysis]") {
  const auto params = support::make_params(unbiased_partition(4), {0.05, 0.0}, support::simplex_layout(2));
  const double delta = params->delta();
  const std::vector<double> bad{0.25 + 2 * delta, 0.25 - 2 * delta, 0.25, 0.25};
  const auto v = check_security(bad, *params);
  CHECK_FALSE(v.pass);
  REQUIRE(v.witness);
  CHECK(*v.witness == 0);
  CHECK(v.describe().find("FAIL at outcome 0") == 0);

  const std::vector<double> edge{0.25 + delta, 0.25 - delta, 0.25, 0.25};
  CHECK(check_security(edge, *params).pass);
}

TEST_CASE("deviations at delta stay within the variational limit", "[analysis]") {
  const auto params = support::make_params(unbiased_partition(4), {0.05, 0.0}, support::simplex_layout(2));
  const std::vector<double> spread{0.30, 0.30, 0.20, 0.20};
  const auto v = check_security(spread, *params);
  CHECK(v.variational_distance == Catch::Approx(0.1));
  CHECK(v.pass);  // 0.1 <= 4 * 0.05 / 2
}

TEST_CASE("Monte Carlo of a fair six-sided die", "[analysis]") {
  const auto params = support::unbiased_params(2, 6);
  const auto stats = monte_carlo(params, support::all_honest(2, 6), 100000, {7, 1});
  CHECK(stats.trials == 100000);
  CHECK(stats.aborted == 0);
  const double sigma = std::sqrt((1.0 / 6) * (5.0 / 6) / 1e5);
  for (double p : stats.empirical()) CHECK(std::abs(p - 1.0 / 6) <= 3 * sigma);
  CHECK(check_security(stats, *params).pass);
  CHECK(stats.p_max() == Catch::Approx(0.5 + 0.5 * stats.variational_distance()));
}

TEST_CASE("Monte Carlo of the shift attack matches the exact law", "[analysis]") {
  const auto params = attack_params();
  const auto roles = attack_roles(*params);
  const auto exact = exact_outcome_distribution(params, roles);
  const auto stats = monte_carlo(params, roles, 100000, {3, 2});
  const double p = exact.probs[0];
  CHECK(std::abs(stats.empirical()[0] - p) <= 3 * std::sqrt(p * (1 - p) / 1e5));
  CHECK(kl_divergence(stats.empirical(), exact.probs) < 10.0 * 2 / 1e5);
  CHECK(check_security(stats, *params).pass);
}

TEST_CASE("a single trial lands on one outcome", "[analysis]") {
  const auto stats = monte_carlo(support::unbiased_params(2, 6), support::all_honest(2, 6), 1, {5, 1});
  CHECK(stats.runs() == 1);
  CHECK(std::count(stats.counts.begin(), stats.counts.end(), 1U) == 1);
}

TEST_CASE("Monte Carlo does not depend on the worker count", "[analysis]") {
  const auto params = support::make_params(unbiased_partition(3), {0.1, 0.0, 0.0}, support::simplex_layout(3));
  const auto adv = random_admissible(4);
  const std::vector<StrategyPtr> roles{honest_strategy(SourceModel::tight({0.4, 0.3, 0.3})), adv, adv};
  const auto one = monte_carlo(params, roles, 3000, {11, 1});
  const auto three = monte_carlo(params, roles, 3000, {11, 3});
  const auto eight = monte_carlo(params, roles, 3000, {11, 8});
  CHECK(one.counts == three.counts);
  CHECK(one.counts == eight.counts);
  CHECK(one.aborted == eight.aborted);
}

TEST_CASE("Monte Carlo converges to the exact law in KL", "[analysis][property]") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t n = 3 + trial;
    const auto source = support::random_source(rng, n, 0.5 / n);
    const auto params = support::make_params(unbiased_partition(n), {source.epsilon(), 0.0},
                                             support::simplex_layout(2));
    const std::vector<StrategyPtr> roles{honest_strategy(source), random_admissible(rng())};
    const auto exact = exact_outcome_distribution(params, roles);
    const auto stats = monte_carlo(params, roles, 100000, {rng(), 2});
    CHECK(kl_divergence(stats.empirical(), exact.probs) < 10.0 * static_cast<double>(n) / 1e5);
  }
}

TEST_CASE("unrelated protocol runs are independent", "[analysis]") {
  const auto params = support::unbiased_params(2, 3);
  const std::vector<InstanceSpec> pair{{params, support::all_honest(2, 3)},
                                       {params, support::all_honest(2, 3)}};
  const auto joint = monte_carlo_joint(pair, 20000, {9, 2});
  CHECK(joint.trials == 20000);
  const auto r = independence_test(joint);
  CHECK(r.independent);
  CHECK(r.dof == 4);
  CHECK(r.mutual_information_bits < 1e-3);
}

TEST_CASE("relayed runs are dependent", "[analysis]") {
  const auto params = support::unbiased_params(2, 2);
  const auto relay = mitm_relay(2);
  const std::vector<InstanceSpec> pair{{params, {honest_strategy(SourceModel::uniform(2)), relay}},
                                       {params, {relay, honest_strategy(SourceModel::uniform(2))}}};
  const auto joint = monte_carlo_joint(pair, 2000, {1, 1});
  CHECK(joint.at(0, 1) + joint.at(1, 0) == 0);
  CHECK(joint.marginals.size() == 2);
  CHECK(joint.marginals[0].counts == std::vector<std::uint64_t>{joint.at(0, 0), joint.at(1, 1)});
  const auto r = independence_test(joint);
  CHECK_FALSE(r.independent);
  CHECK(r.mutual_information_bits > 0.99);
}

TEST_CASE("chi-squared needs enough samples", "[analysis]") {
  const auto params = support::unbiased_params(2, 3);
  const std::vector<InstanceSpec> pair{{params, support::all_honest(2, 3)},
                                       {params, support::all_honest(2, 3)}};
  CHECK_THROWS_AS(independence_test(monte_carlo_joint(pair, 20, {9, 1})), InsufficientSamples);
}

TEST_CASE("report renders as JSON and plot data", "[analysis]") {
  const auto params = attack_params();
  const auto roles = attack_roles(*params);
  AnalysisReport report;
  report.scenario = "attack";
  report.seed = 4;
  report.params = params;
  report.strategies = {"honest", "optimal_shift(c=0)"};
  report.bound = security_bound(*params);
  report.exact = exact_outcome_distribution(params, roles);
  report.exact_verdict = check_security(*report.exact, *params);
  report.empirical = monte_carlo(params, roles, 500, {4, 1});
  report.empirical_verdict = check_security(*report.empirical, *params);
  report.attacks.push_back(optimal_shift_attack(*params, 0, SourceModel::tight({0.3, 0.3, 0.2, 0.2}), 0).report);

  const auto j = nlohmann::json::parse(render_report(report));
  CHECK(j["scenario"] == "attack");
  CHECK(j["pass"] == true);
  CHECK(j["params"]["modulus"] == 4);
  CHECK(j["bound"]["delta"].get<double>() == Catch::Approx(0.1));
  CHECK(j["exact"]["probs"][0].get<double>() == Catch::Approx(0.6));
  CHECK(j["exact"]["p_max"].get<double>() ==
        Catch::Approx(0.5 + 0.5 * j["exact"]["variational_distance"].get<double>()));
  CHECK(j["empirical"]["trials"] == 500);
  CHECK(j["attacks"][0]["achieved"].get<double>() == Catch::Approx(0.6));
  CHECK(j["exact_verdict"]["witness"].is_null());

  const auto tsv = plot_data(report);
  CHECK(tsv.rfind("outcome\tideal\texact\tempirical\tdeviation\tdelta\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);

  // same inputs, same bytes
  AnalysisReport again = report;
  again.empirical = monte_carlo(params, roles, 500, {4, 3});
  again.empirical_verdict = check_security(*again.empirical, *params);
  CHECK(render_report(again) == render_report(report));
}
