#include "dieroll/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "json.hpp"

namespace dieroll {

SecurityBound security_bound(const ProtocolParams& params) {
  SecurityBound b;
  b.alpha = params.partition().alpha();
  double worst = -1.0;
  for (std::size_t k = 0; k < params.parties(); ++k) {
    for (std::size_t o = 0; o < params.outcomes(); ++o) {
      const double term =
          params.epsilons()[k] * static_cast<double>(params.partition().class_size(o));
      if (term > worst) {
        worst = term;
        b.worst_party = k;
        b.worst_outcome = o;
      }
    }
  }
  b.delta = b.alpha + worst;
  return b;
}

double variational_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::vector<double> deviations(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in size");
  std::vector<double> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) d[i] = std::abs(p[i] - q[i]);
  return d;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in size");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double ExactDistribution::max_deviation() const {
  const auto d = deviations(probs, ideal);
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

double ExactDistribution::variational_distance() const {
  return dieroll::variational_distance(probs, ideal);
}

namespace {

struct Combination {
  double weight = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> draws;
  std::size_t shared = 0;
};

struct HonestSlot {
  std::size_t instance;
  std::size_t party;
  const SourceModel* source;
};

std::vector<HonestSlot> honest_slots(std::span<const InstanceSpec> instances) {
  std::vector<HonestSlot> slots;
  for (std::size_t inst = 0; inst < instances.size(); ++inst) {
    for (std::size_t k = 0; k < instances[inst].roles.size(); ++k) {
      const auto& s = instances[inst].roles[k];
      if (s && s->honest()) slots.push_back({inst, k, s->source()});
    }
  }
  return slots;
}

std::vector<double> coalition_distribution(std::span<const InstanceSpec> instances) {
  for (const auto& spec : instances) {
    for (const auto& s : spec.roles) {
      if (s && !s->honest()) return s->shared_distribution();
    }
  }
  return {1.0};
}

std::size_t count_combinations(const std::vector<HonestSlot>& slots, std::size_t shared,
                               std::size_t limit) {
  double total = static_cast<double>(shared);
  for (const auto& slot : slots) total *= static_cast<double>(slot.source->modulus());
  if (total > static_cast<double>(limit)) {
    throw EnumerationLimit(fmt::format("{:.0f} combinations exceed the enumeration limit {}",
                                       total, limit));
  }
  return static_cast<std::size_t>(total);
}

// Calls `visit` for every positive-weight assignment of honest draws and
// shared value, with its probability.
template <typename Visit>
std::size_t enumerate(std::span<const InstanceSpec> instances, const ExactOptions& options,
                      Visit&& visit) {
  const auto slots = honest_slots(instances);
  const auto shared = coalition_distribution(instances);
  const std::size_t total = count_combinations(slots, shared.size(), options.max_combinations);

  std::vector<std::size_t> digits(slots.size(), 0);
  for (;;) {
    Combination c;
    double w = 1.0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      w *= slots[s].source->prob(digits[s]);
      c.draws[{slots[s].instance, slots[s].party}] = static_cast<std::int64_t>(digits[s]);
    }
    if (w > 0.0) {
      for (std::size_t r = 0; r < shared.size(); ++r) {
        if (shared[r] <= 0.0) continue;
        c.weight = w * shared[r];
        c.shared = r;
        FixedRandomness randomness(c.draws, r);
        visit(c, run_session(instances, randomness));
      }
    }
    std::size_t pos = 0;
    while (pos < slots.size() && ++digits[pos] == slots[pos].source->modulus()) digits[pos++] = 0;
    if (pos == slots.size()) break;
  }
  return total;
}

}  // namespace

ExactDistribution exact_outcome_distribution(std::shared_ptr<const ProtocolParams> params,
                                             std::span<const StrategyPtr> strategies,
                                             ExactOptions options) {
  const InstanceSpec spec{params, {strategies.begin(), strategies.end()}};
  const std::size_t n = params->modulus();
  const std::size_t outcomes = params->outcomes();

  ExactDistribution out;
  out.probs.assign(outcomes, 0.0);
  out.ideal = params->partition().ideal().probs();
  double accepted_mass = 0.0;
  // Per honest k: law of the values accepted from the others.
  std::map<std::size_t, std::map<std::vector<std::int64_t>, double>> others;

  out.combinations = enumerate(std::span(&spec, 1), options,
                               [&](const Combination& c, const SessionResult& result) {
    const Transcript& t = result.transcripts.front();
    if (t.aborted()) {
      out.abort_probability += c.weight;
      return;
    }
    out.probs[*t.outcome] += c.weight;
    accepted_mass += c.weight;
    for (const auto& [k, values] : t.accepted) {
      std::vector<std::int64_t> tilde = values;
      tilde.erase(tilde.begin() + static_cast<std::ptrdiff_t>(k));
      others[k][tilde] += c.weight;
    }
  });

  if (accepted_mass <= 0.0) return out;
  out.concluded = true;
  for (double& p : out.probs) p /= accepted_mass;

  for (auto& [k, law] : others) {
    double norm = 0.0;
    std::vector<double> by_sum(n, 0.0);  // mass of Delta_k(y)
    for (const auto& [tilde, mass] : law) {
      const double p = mass / accepted_mass;
      norm += p;
      by_sum[static_cast<std::size_t>(sum_mod(tilde, n))] += p;
    }
    if (std::abs(norm - 1.0) > 1e-9) {
      throw std::logic_error(fmt::format("law of accepted values for party {} sums to {:.17g}",
                                         k + 1, norm));
    }
    const SourceModel& source = *spec.roles[k]->source();
    std::vector<double> formula(outcomes, 0.0);
    for (std::size_t o = 0; o < outcomes; ++o) {
      for (std::size_t x : params->partition().members(o)) {
        for (std::size_t y = 0; y < n; ++y) formula[o] += source.prob(y) * by_sum[(x + n - y) % n];
      }
    }
    out.formula[k] = std::move(formula);
  }
  return out;
}

std::vector<double> ExactJoint::row_marginal() const {
  std::vector<double> m(rows, 0.0);
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b) m[a] += at(a, b);
  return m;
}

std::vector<double> ExactJoint::col_marginal() const {
  std::vector<double> m(cols, 0.0);
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b) m[b] += at(a, b);
  return m;
}

ExactJoint exact_joint_distribution(std::span<const InstanceSpec> instances,
                                    ExactOptions options) {
  if (instances.size() != 2) throw std::invalid_argument("joint law needs two instances");
  ExactJoint out;
  out.rows = instances[0].params->outcomes();
  out.cols = instances[1].params->outcomes();
  out.joint.assign(out.rows * out.cols, 0.0);
  double accepted = 0.0;
  out.combinations = enumerate(instances, options,
                               [&](const Combination& c, const SessionResult& result) {
    const auto& a = result.transcripts[0];
    const auto& b = result.transcripts[1];
    if (a.aborted() || b.aborted()) {
      out.abort_probability += c.weight;
      return;
    }
    out.joint[*a.outcome * out.cols + *b.outcome] += c.weight;
    accepted += c.weight;
  });
  if (accepted > 0.0) {
    for (double& p : out.joint) p /= accepted;
  }
  return out;
}

NoSignallingReport check_no_signalling(std::shared_ptr<const ProtocolParams> params,
                                       std::span<const StrategyPtr> strategies,
                                       ExactOptions options) {
  const InstanceSpec spec{params, {strategies.begin(), strategies.end()}};
  const auto specs = std::span(&spec, 1);
  const auto slots = honest_slots(specs);
  const auto shared = coalition_distribution(specs);
  count_combinations(slots, shared.size(), options.max_combinations);
  const std::size_t n = params->modulus();

  // Payloads reaching L_kk from dishonest labs, ordered by emission.
  auto adversary_payloads = [&](const SessionResult& result, std::size_t k) {
    std::vector<std::pair<LabId, Payload>> seen;
    for (const auto& m : result.transcripts.front().messages) {
      if (m.to == LabId{0, k, k} && m.channel == ChannelClass::FastInterParty &&
          !strategies[m.from.owner]->honest()) {
        seen.emplace_back(m.from, m.payload);
      }
    }
    return seen;
  };

  NoSignallingReport report;
  for (std::size_t target = 0; target < slots.size(); ++target) {
    const std::size_t k = slots[target].party;
    std::vector<std::size_t> digits(slots.size(), 0);
    for (;;) {
      if (digits[target] == 0) {
        for (std::size_t r = 0; r < shared.size(); ++r) {
          std::map<std::pair<std::size_t, std::size_t>, std::int64_t> draws;
          for (std::size_t s = 0; s < slots.size(); ++s) {
            draws[{0, slots[s].party}] = static_cast<std::int64_t>(digits[s]);
          }
          std::optional<std::vector<std::pair<LabId, Payload>>> reference;
          for (std::size_t m = 0; m < n; ++m) {
            draws[{0, k}] = static_cast<std::int64_t>(m);
            FixedRandomness randomness(draws, r);
            const auto seen = adversary_payloads(run_session(specs, randomness), k);
            ++report.checked;
            if (!reference) {
              reference = seen;
            } else if (seen != *reference && report.holds) {
              report.holds = false;
              report.witness = fmt::format(
                  "payloads to party {} change when m_{} goes from 0 to {} (shared value {})",
                  k + 1, k + 1, m, r);
            }
          }
        }
      }
      std::size_t pos = 0;
      while (pos < slots.size() && ++digits[pos] == slots[pos].source->modulus()) digits[pos++] = 0;
      if (pos == slots.size()) break;
    }
  }
  return report;
}

std::vector<double> OutcomeStats::empirical() const {
  std::vector<double> p(counts.size(), 0.0);
  if (trials == 0) return p;
  for (std::size_t o = 0; o < counts.size(); ++o) {
    p[o] = static_cast<double>(counts[o]) / static_cast<double>(trials);
  }
  return p;
}

std::vector<double> OutcomeStats::deviation() const { return deviations(empirical(), ideal); }

double OutcomeStats::variational_distance() const {
  return dieroll::variational_distance(empirical(), ideal);
}

namespace {

template <typename Tally>
void run_trials(std::uint64_t trials, const MonteCarloOptions& options,
                std::vector<Tally>& tallies,
                const std::function<void(Tally&, Randomness&)>& one_run) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::uint64_t>(options.workers, std::max<std::uint64_t>(trials, 1)));
  std::vector<std::exception_ptr> errors(workers);
  auto body = [&](std::size_t w) {
    try {
      for (std::uint64_t i = w; i < trials; i += workers) {
        StreamRandomness randomness(derive_seed(options.seed, i));
        one_run(tallies[w], randomness);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

OutcomeStats empty_stats(const ProtocolParams& params) {
  OutcomeStats s;
  s.counts.assign(params.outcomes(), 0);
  s.ideal = params.partition().ideal().probs();
  return s;
}

void merge(OutcomeStats& into, const OutcomeStats& from) {
  for (std::size_t o = 0; o < into.counts.size(); ++o) into.counts[o] += from.counts[o];
  into.trials += from.trials;
  into.aborted += from.aborted;
}

void tally(OutcomeStats& s, const Transcript& t) {
  if (t.aborted()) {
    ++s.aborted;
  } else {
    ++s.counts[*t.outcome];
    ++s.trials;
  }
}

}  // namespace

OutcomeStats monte_carlo(std::shared_ptr<const ProtocolParams> params,
                         std::span<const StrategyPtr> strategies, std::uint64_t trials,
                         MonteCarloOptions options) {
  if (trials == 0) throw std::invalid_argument("monte carlo needs at least one trial");
  const InstanceSpec spec{params, {strategies.begin(), strategies.end()}};
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::vector<OutcomeStats> tallies(workers, empty_stats(*params));
  run_trials<OutcomeStats>(trials, options, tallies, [&](OutcomeStats& s, Randomness& r) {
    tally(s, run_session(std::span(&spec, 1), r).transcripts.front());
  });
  OutcomeStats total = empty_stats(*params);
  for (const auto& s : tallies) merge(total, s);
  return total;
}

JointStats monte_carlo_joint(std::span<const InstanceSpec> instances, std::uint64_t trials,
                             MonteCarloOptions options) {
  if (instances.size() != 2) throw std::invalid_argument("joint statistics need two instances");
  if (trials == 0) throw std::invalid_argument("monte carlo needs at least one trial");
  JointStats proto;
  proto.rows = instances[0].params->outcomes();
  proto.cols = instances[1].params->outcomes();
  proto.counts.assign(proto.rows * proto.cols, 0);
  proto.marginals = {empty_stats(*instances[0].params), empty_stats(*instances[1].params)};

  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::vector<JointStats> tallies(workers, proto);
  run_trials<JointStats>(trials, options, tallies, [&](JointStats& s, Randomness& r) {
    const auto result = run_session(instances, r);
    const auto& a = result.transcripts[0];
    const auto& b = result.transcripts[1];
    tally(s.marginals[0], a);
    tally(s.marginals[1], b);
    if (a.aborted() || b.aborted()) {
      ++s.aborted;
    } else {
      ++s.counts[*a.outcome * s.cols + *b.outcome];
      ++s.trials;
    }
  });
  JointStats total = proto;
  for (const auto& s : tallies) {
    for (std::size_t i = 0; i < total.counts.size(); ++i) total.counts[i] += s.counts[i];
    total.trials += s.trials;
    total.aborted += s.aborted;
    merge(total.marginals[0], s.marginals[0]);
    merge(total.marginals[1], s.marginals[1]);
  }
  return total;
}

std::string SecurityVerdict::describe() const {
  if (pass) {
    return fmt::format(
        "pass: max deviation {:.6g} within delta {:.6g} (+{:.3g}), variational distance {:.6g}",
        max_deviation, delta, tolerance, variational_distance);
  }
  return fmt::format(
      "FAIL at outcome {}: max deviation {:.6g}, variational distance {:.6g}, delta {:.6g} "
      "(tolerance {:.3g})",
      witness.value_or(0), max_deviation, variational_distance, delta, tolerance);
}

namespace {

SecurityVerdict judge(std::span<const double> probs, std::span<const double> ideal,
                      std::span<const double> tolerance, const ProtocolParams& params) {
  SecurityVerdict v;
  v.delta = security_bound(params).delta;
  const auto dev = deviations(probs, ideal);
  v.variational_distance = variational_distance(probs, ideal);
  double vd_tolerance = 0.0;
  std::size_t worst = 0;
  for (std::size_t o = 0; o < dev.size(); ++o) {
    v.tolerance = std::max(v.tolerance, tolerance[o]);
    vd_tolerance += 0.5 * tolerance[o];
    if (dev[o] > dev[worst]) worst = o;
    if (dev[o] > v.delta + tolerance[o] && !v.witness) v.witness = o;
  }
  v.max_deviation = dev.empty() ? 0.0 : dev[worst];
  const double n_outcomes = static_cast<double>(params.outcomes());
  if (!v.witness && v.variational_distance > n_outcomes * v.delta / 2.0 + vd_tolerance) {
    v.witness = worst;
  }
  v.pass = !v.witness;
  return v;
}

}  // namespace

SecurityVerdict check_security(std::span<const double> probs, const ProtocolParams& params,
                               double tolerance) {
  const std::vector<double> tol(probs.size(), tolerance);
  return judge(probs, params.partition().ideal().probs(), tol, params);
}

SecurityVerdict check_security(const ExactDistribution& exact, const ProtocolParams& params) {
  if (!exact.concluded) {
    // Every combination aborts: nothing to condition on.
    SecurityVerdict v;
    v.delta = security_bound(params).delta;
    v.tolerance = 1e-12;
    return v;
  }
  return check_security(exact.probs, params, 1e-12);
}

SecurityVerdict check_security(const OutcomeStats& stats, const ProtocolParams& params) {
  if (stats.trials == 0) {
    SecurityVerdict v;
    v.delta = security_bound(params).delta;
    return v;
  }
  const auto p = stats.empirical();
  const auto& ideal = params.partition().ideal().probs();
  const double t = static_cast<double>(stats.trials);
  std::vector<double> tol(p.size());
  for (std::size_t o = 0; o < p.size(); ++o) {
    const double var = std::max(p[o] * (1.0 - p[o]), ideal[o] * (1.0 - ideal[o]));
    tol[o] = 3.0 * std::sqrt(var / t) + 1e-12;
  }
  return judge(p, ideal, tol, params);
}

namespace {

double mutual_information_bits(const std::vector<double>& joint, std::size_t rows,
                               std::size_t cols) {
  std::vector<double> pr(rows, 0.0);
  std::vector<double> pc(cols, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      pr[a] += joint[a * cols + b];
      pc[b] += joint[a * cols + b];
    }
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      const double p = joint[a * cols + b];
      if (p > 0.0) mi += p * std::log2(p / (pr[a] * pc[b]));
    }
  }
  return std::max(mi, 0.0);
}

}  // namespace

IndependenceResult independence_test(const JointStats& stats, double significance) {
  if (stats.trials == 0) throw InsufficientSamples("no paired runs without abort");
  std::vector<std::uint64_t> rs(stats.rows, 0);
  std::vector<std::uint64_t> cs(stats.cols, 0);
  for (std::size_t a = 0; a < stats.rows; ++a) {
    for (std::size_t b = 0; b < stats.cols; ++b) {
      rs[a] += stats.at(a, b);
      cs[b] += stats.at(a, b);
    }
  }
  std::vector<std::size_t> live_rows;
  std::vector<std::size_t> live_cols;
  for (std::size_t a = 0; a < stats.rows; ++a)
    if (rs[a] > 0) live_rows.push_back(a);
  for (std::size_t b = 0; b < stats.cols; ++b)
    if (cs[b] > 0) live_cols.push_back(b);

  const double total = static_cast<double>(stats.trials);
  std::vector<double> joint(stats.counts.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    joint[i] = static_cast<double>(stats.counts[i]) / total;
  }

  IndependenceResult r;
  r.mutual_information_bits = mutual_information_bits(joint, stats.rows, stats.cols);
  r.dof = (live_rows.size() - 1) * (live_cols.size() - 1);
  if (r.dof == 0) return r;
  for (std::size_t a : live_rows) {
    for (std::size_t b : live_cols) {
      const double expected = static_cast<double>(rs[a]) * static_cast<double>(cs[b]) / total;
      if (expected < 5.0) {
        throw InsufficientSamples(
            fmt::format("expected count {:.3g} in cell ({}, {}) is below 5", expected, a, b));
      }
      const double diff = static_cast<double>(stats.at(a, b)) - expected;
      r.chi_squared += diff * diff / expected;
    }
  }
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi_squared));
  r.independent = r.p_value >= significance;
  return r;
}

IndependenceResult independence_test(const ExactJoint& exact, double tolerance) {
  IndependenceResult r;
  r.mutual_information_bits = mutual_information_bits(exact.joint, exact.rows, exact.cols);
  const auto pr = exact.row_marginal();
  const auto pc = exact.col_marginal();
  for (std::size_t a = 0; a < exact.rows; ++a) {
    for (std::size_t b = 0; b < exact.cols; ++b) {
      r.max_product_gap = std::max(r.max_product_gap, std::abs(exact.at(a, b) - pr[a] * pc[b]));
    }
  }
  r.dof = (exact.rows - 1) * (exact.cols - 1);
  r.independent = r.max_product_gap <= tolerance;
  r.p_value = r.independent ? 1.0 : 0.0;
  return r;
}

bool AnalysisReport::pass() const {
  return (!exact_verdict || exact_verdict->pass) && (!empirical_verdict || empirical_verdict->pass);
}

namespace {

using nlohmann::json;

json to_json(const SecurityVerdict& v) {
  json j{{"pass", v.pass},
         {"delta", v.delta},
         {"max_deviation", v.max_deviation},
         {"variational_distance", v.variational_distance},
         {"tolerance", v.tolerance}};
  j["witness"] = v.witness ? json(*v.witness) : json(nullptr);
  return j;
}

json to_json(const IndependenceResult& r) {
  return json{{"mutual_information_bits", r.mutual_information_bits},
              {"chi_squared", r.chi_squared},
              {"dof", r.dof},
              {"p_value", r.p_value},
              {"max_product_gap", r.max_product_gap},
              {"independent", r.independent}};
}

json matrix(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  json m = json::array();
  for (std::size_t a = 0; a < rows; ++a) {
    m.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(a * cols),
                                    flat.begin() + static_cast<std::ptrdiff_t>((a + 1) * cols)));
  }
  return m;
}

}  // namespace

std::string render_report(const AnalysisReport& report) {
  const ProtocolParams& p = *report.params;
  json j;
  j["scenario"] = report.scenario;
  j["seed"] = report.seed;
  j["params"] = {{"parties", p.parties()},
                 {"modulus", p.modulus()},
                 {"outcomes", p.outcomes()},
                 {"ideal", p.partition().ideal().probs()},
                 {"class_sizes", p.partition().sizes()},
                 {"alpha", p.partition().alpha()},
                 {"epsilons", p.epsilons()},
                 {"deadlines", [&] {
                    std::vector<double> t;
                    for (std::size_t i = 0; i < p.parties(); ++i) t.push_back(p.layout().deadline(i));
                    return t;
                  }()}};
  j["strategies"] = report.strategies;
  j["bound"] = {{"delta", report.bound.delta},
                {"alpha", report.bound.alpha},
                {"worst_party", report.bound.worst_party},
                {"worst_outcome", report.bound.worst_outcome},
                {"variational_limit", static_cast<double>(p.outcomes()) * report.bound.delta / 2.0}};
  if (report.exact) {
    const auto& e = *report.exact;
    j["exact"] = {{"probs", e.probs},
                  {"deviations", deviations(e.probs, e.ideal)},
                  {"variational_distance", e.variational_distance()},
                  {"p_max", e.p_max()},
                  {"abort_probability", e.abort_probability},
                  {"combinations", e.combinations}};
  }
  if (report.exact_verdict) j["exact_verdict"] = to_json(*report.exact_verdict);
  if (report.empirical) {
    const auto& s = *report.empirical;
    j["empirical"] = {{"counts", s.counts},
                      {"trials", s.trials},
                      {"aborted", s.aborted},
                      {"probs", s.empirical()},
                      {"deviations", s.deviation()},
                      {"variational_distance", s.variational_distance()},
                      {"p_max", s.p_max()}};
  }
  if (report.empirical_verdict) j["empirical_verdict"] = to_json(*report.empirical_verdict);
  if (report.kl_to_exact) {
    j["kl_to_exact"] = std::isfinite(*report.kl_to_exact) ? json(*report.kl_to_exact) : json("inf");
  }
  if (!report.attacks.empty()) {
    json a = json::array();
    for (const auto& r : report.attacks) {
      a.push_back({{"honest_party", r.honest_party},
                   {"target", r.target},
                   {"achieved", r.achieved},
                   {"bound", r.bound},
                   {"shift", r.shift},
                   {"minimizing", r.minimizing}});
    }
    j["attacks"] = a;
  }
  if (report.exact_joint) {
    const auto& e = *report.exact_joint;
    j["exact_joint"] = {{"joint", matrix(e.joint, e.rows, e.cols)},
                        {"abort_probability", e.abort_probability},
                        {"combinations", e.combinations}};
  }
  if (report.exact_independence) j["exact_independence"] = to_json(*report.exact_independence);
  if (report.joint) {
    const auto& s = *report.joint;
    std::vector<double> flat(s.counts.begin(), s.counts.end());
    j["joint"] = {{"counts", matrix(flat, s.rows, s.cols)},
                  {"trials", s.trials},
                  {"aborted", s.aborted},
                  {"equal_outcomes", [&] {
                     std::uint64_t eq = 0;
                     for (std::size_t o = 0; o < std::min(s.rows, s.cols); ++o) eq += s.at(o, o);
                     return eq;
                   }()}};
  }
  if (report.empirical_independence) {
    j["empirical_independence"] = to_json(*report.empirical_independence);
  }
  j["notes"] = report.notes;
  j["pass"] = report.pass();
  return j.dump(2) + "\n";
}

std::string plot_data(const AnalysisReport& report) {
  const ProtocolParams& p = *report.params;
  std::string out = "outcome\tideal\texact\tempirical\tdeviation\tdelta\n";
  const auto& ideal = p.partition().ideal().probs();
  const auto empirical = report.empirical ? report.empirical->empirical() : std::vector<double>{};
  for (std::size_t o = 0; o < p.outcomes(); ++o) {
    const double exact = report.exact ? report.exact->probs[o] : NAN;
    const double emp = report.empirical ? empirical[o] : NAN;
    const double dev = std::abs((report.exact ? exact : emp) - ideal[o]);
    out += fmt::format("{}\t{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\n", o, ideal[o], exact, emp,
                       dev, report.bound.delta);
  }
  return out;
}

}  // namespace dieroll
