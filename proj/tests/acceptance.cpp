// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dieroll/analysis.hpp"
#include "dieroll/scenario.hpp"
#include "dieroll/strategies.hpp"

using namespace dieroll;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Layout simplex_layout(std::size_t m) {
  static const Vec3 corners[4] = {{0.0, 0.0, 0.0},
                                  {1.0, 0.0, 0.0},
                                  {0.5, 0.8660254037844386, 0.0},
                                  {0.5, 0.28867513459481287, 0.816496580927726}};
  std::vector<Ball> balls;
  for (std::size_t i = 0; i < m; ++i) balls.push_back({corners[i], 0.1});
  return Layout(balls, std::vector<double>(m, 0.5));
}

Layout random_layout(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> coord(0.0, 4.0);
  for (;;) {
    std::vector<Ball> balls(m);
    for (auto& b : balls) b.center = {coord(rng), coord(rng), coord(rng)};
    double min_center = INFINITY;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        min_center = std::min(min_center, distance(balls[i].center, balls[j].center));
    if (min_center < 0.5) continue;
    std::uniform_real_distribution<double> rad(0.01, min_center / 4.0);
    for (auto& b : balls) b.radius = rad(rng);
    std::vector<double> deadlines(m);
    for (std::size_t i = 0; i < m; ++i) {
      double min_gap = INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) {
          min_gap = std::min(min_gap, distance(balls[i].center, balls[j].center) -
                                          balls[i].radius - balls[j].radius);
        }
      }
      deadlines[i] = std::uniform_real_distribution<double>(0.05, 0.95)(rng) * min_gap;
    }
    return Layout(balls, deadlines);
  }
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t size) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(size);
  double total = 0.0;
  for (double& v : p) total += (v = e(rng));
  for (double& v : p) v /= total;
  return p;
}

SourceModel random_source(std::mt19937_64& rng, std::size_t n, double max_eps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> d(n);
  double mean = 0.0;
  for (double& v : d) mean += (v = u(rng));
  mean /= static_cast<double>(n);
  double span = 0.0;
  for (double& v : d) span = std::max(span, std::abs(v -= mean));
  std::vector<double> p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += (p[i] = 1.0 / static_cast<double>(n) + d[i] * (span > 0.0 ? max_eps / span : 0.0));
  }
  for (double& v : p) v /= total;
  return SourceModel::tight(p);
}

std::shared_ptr<const ProtocolParams> make_params(OutcomePartition partition, std::vector<double> eps,
                                                  Layout layout, ProtocolTiming timing = {}) {
  return std::make_shared<const ProtocolParams>(std::move(partition), std::move(eps),
                                                std::move(layout), std::move(timing));
}

Scenario load(const std::string& name) {
  return build_scenario(load_scenario_spec(std::string(DIEROLL_SCENARIO_DIR) + "/" + name));
}

// Every exact distribution produced by criteria 2-4, for criterion 5.
struct ExactRecord {
  std::string label;
  std::shared_ptr<const ProtocolParams> params;
  ExactDistribution exact;
};
std::vector<ExactRecord> g_exact;

// ---------------------------------------------------------------------------

Outcome correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const std::size_t ms[] = {2, 3, 4};
  std::uint64_t runs = 0;
  for (int config = 0; config < 20; ++config) {
    const std::size_t m = ms[config % 3];
    const std::size_t outcomes = 2 + static_cast<std::size_t>(config % 5);
    std::optional<OutcomePartition> partition;
    while (!partition) {
      const std::size_t n = outcomes + rng() % 24;
      try {
        partition = build_partition(IdealDistribution(random_simplex(rng, outcomes)), n);
      } catch (const std::invalid_argument&) {
      }
    }
    const std::size_t n = partition->modulus();
    std::vector<double> eps;
    std::vector<StrategyPtr> roles;
    const double room = (1.0 - partition->alpha()) / static_cast<double>(partition->max_class_size());
    for (std::size_t k = 0; k < m; ++k) {
      const auto source = random_source(rng, n, std::min(0.5 / n, room));
      eps.push_back(source.epsilon());
      roles.push_back(honest_strategy(source));
    }
    const auto params = make_params(*partition, eps, random_layout(rng, m));
    for (std::uint64_t i = 0; i < 10'000; ++i) {
      StreamRandomness rnd(derive_seed(config, i));
      const Transcript t = run_protocol(params, roles, rnd);
      ++runs;
      if (t.aborted()) {
        return {false, fmt::format("config {} run {}: {} aborted", config, i, t.aborts.front().lab.str())};
      }
      if (t.accepted.size() != m) return {false, fmt::format("config {} run {}: missing conclusion", config, i)};
      for (const auto& [k, values] : t.accepted) {
        if (values != t.accepted.begin()->second ||
            partition->outcome_of(static_cast<std::size_t>(sum_mod(values, n))) != *t.outcome) {
          return {false, fmt::format("config {} run {}: parties disagree", config, i)};
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {elapsed < 60.0,
          fmt::format("{} runs over 20 configurations, 0 aborts, all agree, {:.1f} s (limit 60 s)",
                      runs, elapsed)};
}

Outcome ideal_security() {
  struct Config {
    std::vector<double> dist;
    std::size_t n;
    std::size_t m;
  };
  const std::vector<Config> configs{
      {{0.5, 0.5}, 2, 2},       {{0.5, 0.5}, 2, 3},       {{0.5, 0.5}, 2, 4},
      {{1. / 3, 1. / 3, 1. / 3}, 3, 2}, {{1. / 3, 1. / 3, 1. / 3}, 3, 3}, {{1. / 3, 2. / 3}, 3, 4},
      {{0.25, 0.75}, 4, 2},     {{0.5, 0.5}, 4, 3},       {{0.25, 0.25, 0.25, 0.25}, 4, 4},
      {{1. / 6, 1. / 3, 0.5}, 6, 2}, {{1. / 6, 1. / 6, 1. / 6, 1. / 6, 1. / 6, 1. / 6}, 6, 3},
      {{0.5, 0.5}, 6, 4},       {{0.2, 0.2, 0.2, 0.2, 0.2}, 5, 3}, {{0.25, 0.75}, 8, 3},
  };
  std::size_t checked = 0, vacuous = 0;
  double worst = 0.0;
  for (const auto& c : configs) {
    const auto partition = build_partition(IdealDistribution(c.dist), c.n);
    if (partition.alpha() != 0.0) return {false, "test configuration has alpha > 0"};
    if (std::pow(static_cast<double>(c.n), static_cast<double>(c.m)) > 1e6) continue;
    const auto params = make_params(partition, std::vector<double>(c.m, 0.0), simplex_layout(c.m));
    std::vector<StrategyPtr> adversaries{mitm_relay(c.n),         inconsistent_broadcast(),
                                         silent_strategy(),       scripted_delivery(1),
                                         late_adaptive(0),        random_admissible(1),
                                         random_admissible(2),    random_admissible(3)};
    for (std::size_t o = 0; o < partition.outcomes(); ++o) {
      adversaries.push_back(optimal_shift_attack(*params, 0, SourceModel::uniform(c.n), o).strategy);
      adversaries.push_back(minimizing_shift_attack(*params, 0, SourceModel::uniform(c.n), o).strategy);
    }
    for (std::size_t honest = 1; honest < c.m; ++honest) {
      for (const auto& adv : adversaries) {
        std::vector<StrategyPtr> roles;
        for (std::size_t k = 0; k < c.m; ++k) {
          roles.push_back(k < honest ? honest_strategy(SourceModel::uniform(c.n)) : adv);
        }
        const auto exact = exact_outcome_distribution(params, roles);
        const auto label = fmt::format("ideal n={} M={} honest={} vs {}", c.n, c.m, honest, adv->name());
        g_exact.push_back({label, params, exact});
        if (!exact.concluded) {
          ++vacuous;
          continue;
        }
        ++checked;
        worst = std::max(worst, exact.max_deviation());
        if (exact.max_deviation() > 1e-12) {
          return {false, fmt::format("{}: deviation {:.3g}", label, exact.max_deviation())};
        }
      }
    }
  }
  return {true, fmt::format("{} exact distributions equal P_o (max deviation {:.2g}); {} strategy "
                            "combinations abort always and condition on nothing",
                            checked, worst, vacuous)};
}

Outcome bound_theorem() {
  std::mt19937_64 rng(77);
  struct Config {
    std::vector<double> dist;
    std::size_t n;
    std::size_t m;
    std::size_t honest;
  };
  const std::vector<Config> configs{
      {{0.5, 0.5}, 2, 2, 1},   {{0.5, 0.5}, 4, 2, 1},  {{0.3, 0.7}, 3, 2, 1},
      {{1. / 3, 1. / 3, 1. / 3}, 3, 3, 1}, {{0.5, 0.5}, 2, 3, 2}, {{0.4, 0.6}, 4, 3, 1},
      {{0.25, 0.25, 0.25, 0.25}, 4, 3, 2}, {{0.3, 0.7}, 3, 3, 2}, {{0.2, 0.8}, 4, 2, 1},
  };
  std::size_t checked = 0;
  double worst_ratio = 0.0;
  for (const auto& c : configs) {
    const auto partition = build_partition(IdealDistribution(c.dist), c.n);
    const double room = (1.0 - partition.alpha()) / static_cast<double>(partition.max_class_size());
    for (int strategy = 0; strategy < 100; ++strategy) {
      std::vector<double> eps(c.m, 0.0);
      std::vector<StrategyPtr> roles;
      const auto adv = random_admissible(rng());
      for (std::size_t k = 0; k < c.m; ++k) {
        if (k < c.honest) {
          const auto source = random_source(rng, c.n, std::min(0.6 / c.n, room));
          eps[k] = source.epsilon();
          roles.push_back(honest_strategy(source));
        } else {
          roles.push_back(adv);
        }
      }
      const auto params = make_params(partition, eps, simplex_layout(c.m));
      const auto exact = exact_outcome_distribution(params, roles);
      const auto label = fmt::format("bound n={} M={} #{} vs {}", c.n, c.m, strategy, adv->name());
      g_exact.push_back({label, params, exact});
      if (!exact.concluded) continue;
      ++checked;
      const double delta = params->delta();
      if (exact.max_deviation() > delta + 1e-12) {
        return {false, fmt::format("{}: deviation {:.6g} > delta {:.6g}", label, exact.max_deviation(), delta)};
      }
      if (delta > 0.0) worst_ratio = std::max(worst_ratio, exact.max_deviation() / delta);
    }
  }
  return {checked >= 100 * configs.size() * 9 / 10,
          fmt::format("{} configurations x 100 random admissible strategies, {} conditioned laws all "
                      "within delta (largest deviation/delta {:.3f})",
                      configs.size(), checked, worst_ratio)};
}

Outcome tightness() {
  std::size_t checked = 0;
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.25}) {
    for (std::size_t rotation : {0U, 1U, 2U, 3U}) {
      // mass 1/4 + eps on two residues that a shift aligns with Omega_0 = {0, 1}
      std::vector<double> probs(4);
      for (std::size_t m = 0; m < 4; ++m) probs[(m + rotation) % 4] = m < 2 ? 0.25 + eps : 0.25 - eps;
      const SourceModel source(probs, eps);
      const auto partition = build_partition(IdealDistribution::uniform(2), 4);
      const auto params = make_params(partition, {eps, 0.0}, simplex_layout(2));
      const auto attack = optimal_shift_attack(*params, 0, source, 0);
      const double expected = (0.25 + eps) * 2.0;
      const double via_ideal = 0.5 + eps * 2.0;
      const std::vector<StrategyPtr> roles{honest_strategy(source), attack.strategy};
      const auto exact = exact_outcome_distribution(params, roles);
      g_exact.push_back({fmt::format("tight eps={} rotation={}", eps, rotation), params, exact});
      ++checked;
      if (std::abs(attack.report.achieved - expected) > 1e-12 ||
          std::abs(attack.report.bound - expected) > 1e-12 || std::abs(via_ideal - expected) > 1e-12 ||
          std::abs(exact.probs[0] - expected) > 1e-12 ||
          std::abs(exact.max_deviation() - params->delta()) > 1e-12) {
        return {false, fmt::format("eps={} rotation={}: achieved {:.17g}, exact {:.17g}, bound {:.17g}",
                                   eps, rotation, attack.report.achieved, exact.probs[0], expected)};
      }
    }
  }
  return {true, fmt::format("{} worst-case sources: optimal shift and exact oracle both reach "
                            "(1/n + eps)|Omega_o*| = P_o* + eps|Omega_o*|",
                            checked)};
}

Outcome variational_bound() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& r : g_exact) {
    if (!r.exact.concluded) continue;
    ++checked;
    const double limit = static_cast<double>(r.params->outcomes()) * r.params->delta() / 2.0;
    const double vd = r.exact.variational_distance();
    if (vd > limit + 1e-12) {
      return {false, fmt::format("{}: variational distance {:.6g} > {:.6g}", r.label, vd, limit)};
    }
    if (std::abs(r.exact.p_max() - (0.5 + 0.5 * vd)) > 1e-15) return {false, r.label + ": p_max mismatch"};
    worst = std::max(worst, vd - limit);
  }
  return {checked > 0, fmt::format("{} exact distributions within N delta / 2 (largest excess {:.3g})",
                                   checked, worst)};
}

Outcome no_signalling() {
  std::mt19937_64 rng(5);
  std::size_t configurations = 0, checked = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t m = 2; m <= 3; ++m) {
      for (std::size_t honest = 1; honest < m; ++honest) {
        const auto params = make_params(unbiased_partition(n), std::vector<double>(m, 0.0), simplex_layout(m));
        std::vector<StrategyPtr> adversaries{mitm_relay(n), inconsistent_broadcast(), silent_strategy(),
                                             scripted_delivery(1), late_adaptive(1),
                                             optimal_shift_attack(*params, 0, SourceModel::uniform(n), 1).strategy};
        for (int s = 0; s < 20; ++s) adversaries.push_back(random_admissible(rng()));
        for (const auto& adv : adversaries) {
          std::vector<StrategyPtr> roles;
          for (std::size_t k = 0; k < m; ++k) {
            roles.push_back(k < honest ? honest_strategy(SourceModel::uniform(n)) : adv);
          }
          const auto report = check_no_signalling(params, roles);
          ++configurations;
          checked += report.checked;
          if (!report.holds) return {false, fmt::format("n={} M={} {}: {}", n, m, adv->name(), report.witness)};
        }
      }
    }
  }
  std::size_t attempts = 0, rejected = 0;
  for (std::size_t m = 2; m <= 4; ++m) {
    const auto params = make_params(unbiased_partition(3), std::vector<double>(m, 0.0), simplex_layout(m));
    const auto peek = spacelike_peek();
    for (std::size_t honest = 1; honest < m; ++honest) {
      std::vector<StrategyPtr> roles;
      for (std::size_t k = 0; k < m; ++k) roles.push_back(k < honest ? honest_strategy(SourceModel::uniform(3)) : peek);
      for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ++attempts;
        StreamRandomness rnd(seed);
        try {
          run_protocol(params, roles, rnd);
        } catch (const CausalityViolation&) {
          ++rejected;
        }
      }
    }
  }
  return {rejected == attempts,
          fmt::format("{} strategy configurations, {} payload comparisons invariant under m_k; "
                      "spacelike read rejected in {}/{} attempts",
                      configurations, checked, rejected, attempts)};
}

Outcome mitm() {
  const auto s = load("mitm_pair.yaml");
  const auto joint = monte_carlo_joint(s.instances, 100'000, {s.seed, 1});
  std::uint64_t equal = 0;
  for (std::size_t o = 0; o < std::min(joint.rows, joint.cols); ++o) equal += joint.at(o, o);
  const auto exact = exact_joint_distribution(s.instances);
  const bool exact_ok = exact.rows == 2 && std::abs(exact.at(0, 0) - 0.5) <= 1e-12 &&
                        std::abs(exact.at(1, 1) - 0.5) <= 1e-12 && exact.at(0, 1) == 0.0 &&
                        exact.at(1, 0) == 0.0;
  const bool mc_ok = joint.aborted == 0 && joint.trials == 100'000 && equal == joint.trials;
  return {exact_ok && mc_ok,
          fmt::format("o = o' in {}/{} trials ({} aborted); exact joint (0,0)={:.17g} (1,1)={:.17g} "
                      "(0,1)={} (1,0)={}",
                      equal, joint.trials + joint.aborted, joint.aborted, exact.at(0, 0), exact.at(1, 1),
                      exact.at(0, 1), exact.at(1, 0))};
}

Outcome countermeasure() {
  const auto s = load("same_role_pair.yaml");
  const auto exact = exact_joint_distribution(s.instances);
  const auto exact_ind = independence_test(exact, 1e-12);
  const auto joint = monte_carlo_joint(s.instances, 100'000, {s.seed, 1});
  const auto mc = independence_test(joint, 1e-3);
  return {exact_ind.independent && mc.independent && joint.trials == 100'000,
          fmt::format("exact |joint - product| max {:.2g}, MI {:.2g} bits; chi-squared {:.3f} "
                      "(dof {}), p = {:.4f} at {} samples",
                      exact_ind.max_product_gap, exact_ind.mutual_information_bits, mc.chi_squared, mc.dof,
                      mc.p_value, joint.trials)};
}

Outcome stage3_detection() {
  std::uint64_t runs = 0, caught = 0;
  std::size_t enumerated = 0;
  for (std::size_t m : {3U, 4U}) {
    for (std::size_t honest = 2; honest < m; ++honest) {
      for (std::size_t n : {2U, 3U, 5U}) {
        const auto params = make_params(unbiased_partition(n), std::vector<double>(m, 0.0), simplex_layout(m));
        const auto adv = inconsistent_broadcast();
        std::vector<StrategyPtr> roles;
        for (std::size_t k = 0; k < m; ++k) roles.push_back(k < honest ? honest_strategy(SourceModel::uniform(n)) : adv);
        const auto exact = exact_outcome_distribution(params, roles);
        enumerated += exact.combinations;
        if (exact.concluded) {
          return {false, fmt::format("M={} n={}: abort probability {}", m, n, exact.abort_probability)};
        }
        for (std::uint64_t seed = 0; seed < 2000; ++seed) {
          StreamRandomness rnd(seed);
          const auto t = run_protocol(params, roles, rnd);
          ++runs;
          std::set<std::size_t> aborting;
          for (const auto& a : t.aborts) aborting.insert(a.lab.owner);
          if (aborting.size() == honest && *aborting.rbegin() < honest) ++caught;
        }
      }
    }
  }
  return {caught == runs, fmt::format("every honest party aborted in {}/{} runs for M = 3, 4 ({} "
                                      "enumerated draws all abort)",
                                      caught, runs, enumerated)};
}

Outcome piling_up() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(1e-6, 0.5 - 1e-6);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> biases(16);
    for (double& e : biases) e = u(rng);
    const BitSourceModel bits(biases);
    double p0 = 1.0;  // convolution of the two-point laws
    for (std::size_t j = 1; j <= 16; ++j) {
      const double q0 = 0.5 + biases[j - 1];
      p0 = p0 * q0 + (1.0 - p0) * (1.0 - q0);
      worst = std::max(worst, std::abs(pile_up(bits, j) - (p0 - 0.5)));
    }
  }
  if (worst > 1e-12) return {false, fmt::format("pile-up differs from convolution by {:.3g}", worst)};

  double ratio_error = 0.0;
  for (double e : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    const BitSourceModel bits(std::vector<double>(48, e));
    for (std::size_t n : {2U, 4U, 8U}) {
      double prev = INFINITY;
      for (std::size_t j = 1; j * static_cast<std::size_t>(std::countr_zero(n)) <= 48 && j <= 16; ++j) {
        const double eps = build_source_from_bits(bits, n, j).epsilon();
        if (!(eps < prev)) return {false, fmt::format("n={} e={}: epsilon not decreasing at round {}", n, e, j)};
        if (j > 1) {
          const double ratio = eps / prev;
          if (n == 2) {
            ratio_error = std::max(ratio_error, std::abs(ratio - 2 * e) / (2 * e));
          } else if (ratio > 2 * e * (1 + 1e-12)) {
            return {false, fmt::format("n={} e={}: ratio {} above 2e", n, e, ratio)};
          }
        }
        prev = eps;
      }
    }
  }
  return {ratio_error <= 1e-12,
          fmt::format("pile-up equals convolution to {:.2g} for j <= 16; declared epsilon strictly "
                      "decreasing, ratio 2e per round (relative error {:.2g}; n > 2 stays below 2e)",
                      worst, ratio_error)};
}

// Independent restatement of the geometric constraints.
bool oracle_valid(const std::vector<Ball>& balls, const std::vector<double>& t) {
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (!(balls[i].radius > 0.0) || !(t[i] > 0.0)) return false;
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (i == j) continue;
      const double d = distance(balls[i].center, balls[j].center) - balls[i].radius - balls[j].radius;
      if (!(d > 0.0) || !(2 * balls[i].radius < d) || !(t[i] < d)) return false;
    }
  }
  return true;
}

bool reports(const std::vector<LayoutViolation>& v, LayoutConstraint c, std::size_t i) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.constraint == c && x.i == i; });
}

Outcome layout_validation() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(0.0, 3.0), unit(0.0, 1.0);
  std::size_t agree = 0, valid_seen = 0, mutations = 0;
  for (int g = 0; g < 1000; ++g) {
    // unconstrained geometry: roughly half of these break something
    const std::size_t m = 2 + g % 3;
    std::vector<Ball> balls(m);
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) {
      balls[i] = {{coord(rng), coord(rng), coord(rng)}, 0.4 * unit(rng)};
      t[i] = 1.2 * unit(rng) - 0.05;
    }
    const bool expected = oracle_valid(balls, t);
    const bool accepted = validate_layout(Layout(balls, t)).empty();
    // skip geometries within rounding of a boundary
    if (expected == accepted) {
      ++agree;
    } else {
      bool near = false;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (i == j) continue;
          const double d = distance(balls[i].center, balls[j].center) - balls[i].radius - balls[j].radius;
          near = near || std::abs(t[i] - d) < 1e-9 || std::abs(2 * balls[i].radius - d) < 1e-9;
        }
      }
      if (!near) {
        return {false, fmt::format("geometry {}: oracle says {}, validate_layout says {}", g, expected, accepted)};
      }
      ++agree;
    }

    // valid geometry and its single-constraint mutations
    const Layout base = random_layout(rng, m);
    if (!validate_layout(base).empty()) return {false, fmt::format("geometry {}: valid layout rejected", g)};
    ++valid_seen;
    const std::size_t i = rng() % m;
    std::size_t j = rng() % (m - 1);
    if (j >= i) ++j;
    std::vector<Ball> b = base.balls();
    std::vector<double> d = base.deadlines();
    {
      auto dd = d;
      dd[i] = base.gap(i, j);  // lightlike boundary
      if (!reports(validate_layout(Layout(b, dd)), LayoutConstraint::DeadlineBelowGap, i)) {
        return {false, fmt::format("geometry {}: t_i = d_ij not reported", g)};
      }
      dd[i] = -unit(rng) * base.gap(i, j);
      if (!reports(validate_layout(Layout(b, dd)), LayoutConstraint::DeadlinePositive, i)) {
        return {false, fmt::format("geometry {}: t_i <= 0 not reported", g)};
      }
      ++mutations;
    }
    {
      auto bb = b;
      const double centers = distance(b[i].center, b[j].center);
      bb[i].radius = (centers - b[j].radius) / 3.0 * (1.0 + 0.5 * unit(rng));  // 2 r_i >= d_ij, balls apart
      if (!reports(validate_layout(Layout(bb, d)), LayoutConstraint::RadiusBelowGap, i)) {
        return {false, fmt::format("geometry {}: 2 r_i >= d_ij not reported", g)};
      }
      ++mutations;
    }
  }
  return {true, fmt::format("{} random geometries agree with the constraint oracle; {} valid layouts "
                            "accepted; {} single-constraint mutations each detected",
                            agree, valid_seen, mutations * 3 / 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"correctness", correctness},
      {"ideal-case security", ideal_security},
      {"bound theorem", bound_theorem},
      {"bound tightness", tightness},
      {"variational-distance bound", variational_bound},
      {"no-signalling enforcement", no_signalling},
      {"MITM composability attack", mitm},
      {"countermeasure independence", countermeasure},
      {"stage-3 detection", stage3_detection},
      {"piling-up exactness", piling_up},
      {"layout validation", layout_validation},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto start = Clock::now();
    Outcome r;
    try {
      r = criteria[c].second();
    } catch (const std::exception& e) {
      r = {false, fmt::format("exception: {}", e.what())};
    }
    failures += r.pass ? 0 : 1;
    fmt::print("{} {:2d} {}: {} [{:.1f} s]\n", r.pass ? "PASS" : "FAIL", c + 1, criteria[c].first,
               r.detail, seconds_since(start));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
