#pragma once

// YAML scenario files: layout, distribution, partition, timing, per-party
// strategies and sources, and an optional second instance run in parallel.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dieroll/protocol.hpp"
#include "dieroll/strategies.hpp"

namespace dieroll {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

class ScenarioError : public std::runtime_error {
 public:
  /// `line` is one-based; 0 when unknown.
  ScenarioError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One P_o as written: its value and, when the text is a ratio of integers or
/// a finite decimal, the reduced fraction.
struct DistEntry {
  double value = 0.0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> fraction;
  std::string text;
};

/// Accepts decimals, "p/q", "pi" anywhere a number may stand ("1/pi"),
/// "1 - <term>", and one "rest" entry that absorbs the remainder. Throws
/// ScenarioError.
std::vector<DistEntry> parse_distribution(const std::vector<std::string>& terms);

struct SuggestedModulus {
  std::size_t n = 0;
  double alpha = 0.0;
};

/// Smallest n whose largest-remainder partition realizes alpha' <= alpha.
/// alpha = 0 needs every entry rational and returns the least common
/// denominator (raised to a multiple >= N); otherwise throws
/// std::invalid_argument explaining why.
SuggestedModulus suggest_n(const std::vector<DistEntry>& dist, double alpha,
                           std::size_t max_n = 10'000'000);

struct SourceSpec {
  enum class Kind { Uniform, Probs, Bits } kind = Kind::Uniform;
  std::vector<double> probs;
  std::vector<double> biases;
  std::size_t rounds = 1;
};

struct PartySpec {
  bool honest = true;
  SourceSpec source;
  std::optional<double> epsilon;
  std::size_t line = 0;
};

/// Everything a scenario declares, before cross-checks.
struct ScenarioSpec {
  std::string name;
  std::vector<Ball> balls;
  std::vector<double> deadlines;
  std::vector<DistEntry> distribution;
  std::size_t n = 0;
  std::optional<std::vector<std::size_t>> class_sizes;
  std::optional<double> alpha;
  ProtocolTiming timing;
  std::vector<PartySpec> parties;
  std::optional<std::vector<PartySpec>> parallel;
  std::string adversary = "none";
  std::optional<std::int64_t> adversary_target;
  std::optional<std::uint64_t> adversary_seed;
  std::optional<std::int64_t> adversary_value;
  std::optional<double> adversary_delay;  // internal time units
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
};

ScenarioSpec parse_scenario(const std::string& yaml_text);
ScenarioSpec load_scenario_spec(const std::string& path);

/// Every problem in the scenario, one line each: layout constraints, partition
/// invariants, source dimensions, feasibility, strategy references.
std::vector<std::string> validate_scenario(const ScenarioSpec& spec);

struct Scenario {
  std::string name;
  std::vector<InstanceSpec> instances;  // one, or two for parallel scenarios
  std::vector<std::vector<std::string>> role_names;
  std::vector<AttackReport> attacks;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  const ProtocolParams& params() const { return *instances.front().params; }
};

/// Builds params and strategies; throws ScenarioError if validate_scenario
/// reports anything.
Scenario build_scenario(const ScenarioSpec& spec);

SourceModel build_source(const SourceSpec& spec, std::size_t n);

}  // namespace dieroll
