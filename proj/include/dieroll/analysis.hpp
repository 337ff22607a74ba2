#pragma once

// Security bound, exact enumeration oracles, Monte Carlo estimation and the
// statistical tests used on their output.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dieroll/protocol.hpp"
#include "dieroll/strategies.hpp"

namespace dieroll {

struct SecurityBound {
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t worst_party = 0;
  std::size_t worst_outcome = 0;
};

SecurityBound security_bound(const ProtocolParams& params);

class EnumerationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactOptions {
  /// Upper bound on enumerated (honest draws x shared value) combinations.
  std::size_t max_combinations = 1'000'000;
};

double variational_distance(std::span<const double> p, std::span<const double> q);
std::vector<double> deviations(std::span<const double> p, std::span<const double> q);
/// D(p || q) in nats; infinite if p puts mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct ExactDistribution {
  /// P(o) conditioned on no abort; all zero if every combination aborts.
  std::vector<double> probs;
  std::vector<double> ideal;
  double abort_probability = 0.0;
  std::size_t combinations = 0;
  /// False when every combination aborts.
  bool concluded = false;
  /// For each honest k, P(o) recomputed as
  /// sum_{x in Omega_o} sum_y P_k(y) sum_{m~ in Delta_k(x - y)} P_k^S(m~),
  /// with P_k^S the law of the values k accepted from the others.
  std::map<std::size_t, std::vector<double>> formula;

  double max_deviation() const;
  double variational_distance() const;
  double p_max() const { return 0.5 + 0.5 * variational_distance(); }
};

/// Exhaustive over every honest draw and every coalition shared value.
/// Throws EnumerationLimit beyond `options.max_combinations` and
/// std::logic_error if the law of the accepted values fails to normalize.
ExactDistribution exact_outcome_distribution(std::shared_ptr<const ProtocolParams> params,
                                             std::span<const StrategyPtr> strategies,
                                             ExactOptions options = {});

/// Joint law of the outcomes of two parallel instances.
struct ExactJoint {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> joint;  // row-major, conditioned on neither instance aborting
  double abort_probability = 0.0;
  std::size_t combinations = 0;

  double at(std::size_t o, std::size_t o2) const { return joint.at(o * cols + o2); }
  std::vector<double> row_marginal() const;
  std::vector<double> col_marginal() const;
};

ExactJoint exact_joint_distribution(std::span<const InstanceSpec> instances,
                                    ExactOptions options = {});

/// For every honest k, every fixed shared value and every fixed draw of the
/// other honest parties: the stage-II payloads reaching L_kk from dishonest
/// labs must not change as m_k ranges over Z_n.
struct NoSignallingReport {
  bool holds = true;
  std::size_t checked = 0;
  std::string witness;
};

NoSignallingReport check_no_signalling(std::shared_ptr<const ProtocolParams> params,
                                       std::span<const StrategyPtr> strategies,
                                       ExactOptions options = {});

struct OutcomeStats {
  std::vector<std::uint64_t> counts;  // per outcome, non-aborted runs only
  std::uint64_t trials = 0;           // non-aborted runs
  std::uint64_t aborted = 0;
  std::vector<double> ideal;

  std::uint64_t runs() const { return trials + aborted; }
  std::vector<double> empirical() const;
  std::vector<double> deviation() const;
  double variational_distance() const;
  double p_max() const { return 0.5 + 0.5 * variational_distance(); }
};

struct MonteCarloOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Run i uses StreamRandomness(derive_seed(seed, i)); results do not depend
/// on the worker count.
OutcomeStats monte_carlo(std::shared_ptr<const ProtocolParams> params,
                         std::span<const StrategyPtr> strategies, std::uint64_t trials,
                         MonteCarloOptions options = {});

struct JointStats {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;  // row-major
  std::uint64_t trials = 0;
  std::uint64_t aborted = 0;
  std::vector<OutcomeStats> marginals;  // per instance

  std::uint64_t at(std::size_t o, std::size_t o2) const { return counts.at(o * cols + o2); }
};

JointStats monte_carlo_joint(std::span<const InstanceSpec> instances, std::uint64_t trials,
                             MonteCarloOptions options = {});

struct SecurityVerdict {
  bool pass = true;
  std::optional<std::size_t> witness;
  double delta = 0.0;
  double max_deviation = 0.0;
  double variational_distance = 0.0;
  /// Slack added to delta per outcome: 1e-12 for exact input, 3 sigma for
  /// sampled input.
  double tolerance = 0.0;

  std::string describe() const;
};

SecurityVerdict check_security(const ExactDistribution& exact, const ProtocolParams& params);
SecurityVerdict check_security(std::span<const double> probs, const ProtocolParams& params,
                               double tolerance = 1e-12);
SecurityVerdict check_security(const OutcomeStats& stats, const ProtocolParams& params);

struct IndependenceResult {
  double mutual_information_bits = 0.0;
  double chi_squared = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double max_product_gap = 0.0;  // exact input only
  bool independent = true;
};

/// Chi-squared test of independence on paired counts. Rows and columns that
/// never occur are dropped; throws InsufficientSamples if an expected count
/// falls below 5.
IndependenceResult independence_test(const JointStats& stats, double significance = 1e-3);
/// Exact input: independent iff |joint - product of marginals| <= tolerance.
IndependenceResult independence_test(const ExactJoint& exact, double tolerance = 1e-12);

struct AnalysisReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::shared_ptr<const ProtocolParams> params;
  std::vector<std::string> strategies;
  SecurityBound bound;
  std::optional<ExactDistribution> exact;
  std::optional<SecurityVerdict> exact_verdict;
  std::optional<OutcomeStats> empirical;
  std::optional<SecurityVerdict> empirical_verdict;
  std::optional<double> kl_to_exact;
  std::vector<AttackReport> attacks;
  std::optional<ExactJoint> exact_joint;
  std::optional<IndependenceResult> exact_independence;
  std::optional<JointStats> joint;
  std::optional<IndependenceResult> empirical_independence;
  std::vector<std::string> notes;

  bool pass() const;
};

/// Machine-readable JSON.
std::string render_report(const AnalysisReport& report);
/// Tab-separated: outcome, ideal, exact, empirical, deviation, delta.
std::string plot_data(const AnalysisReport& report);

}  // namespace dieroll
