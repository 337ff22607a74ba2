#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dieroll {

/// Tolerance on sum(P_o) = 1.
inline constexpr double kProbabilitySumTolerance = 1e-12;

/// The agreed outcome distribution {P_o} over Z_N.
class IdealDistribution {
 public:
  /// Throws std::invalid_argument unless N >= 2, each P_o in [0, 1] and the
  /// entries sum to one.
  explicit IdealDistribution(std::vector<double> probs);

  static IdealDistribution uniform(std::size_t outcomes);

  std::size_t outcomes() const { return probs_.size(); }
  double operator[](std::size_t o) const { return probs_.at(o); }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// An exact cover of Z_n by N classes Omega_o, stored as consecutive blocks:
/// Omega_0 = {0..|Omega_0|-1}, Omega_1 the next |Omega_1| residues, etc.
class OutcomePartition {
 public:
  /// Throws std::invalid_argument when sizes and distribution disagree in
  /// length, n < N, or `alpha` is below the realized maximum deviation.
  OutcomePartition(IdealDistribution ideal, std::vector<std::size_t> sizes, double alpha);

  const IdealDistribution& ideal() const { return ideal_; }
  std::size_t modulus() const { return modulus_; }
  std::size_t outcomes() const { return sizes_.size(); }
  double alpha() const { return alpha_; }

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t class_size(std::size_t o) const { return sizes_.at(o); }
  std::size_t max_class_size() const;
  std::size_t first_member(std::size_t o) const { return offsets_.at(o); }
  std::vector<std::size_t> members(std::size_t o) const;
  bool contains(std::size_t o, std::size_t x) const;

  /// The o with x in Omega_o. Throws std::out_of_range unless x < n.
  std::size_t outcome_of(std::size_t x) const;

  /// max_o | |Omega_o|/n - P_o |, with entries whose n*P_o is integral up to
  /// rounding counted as exact.
  double realized_deviation() const;

 private:
  IdealDistribution ideal_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t modulus_ = 0;
  double alpha_ = 0.0;
};

/// Largest-remainder apportionment of n over the distribution, ties to the
/// lower outcome index; alpha is the realized deviation.
/// Throws std::invalid_argument if n < N or a positive-probability outcome
/// would receive an empty class.
OutcomePartition build_partition(const IdealDistribution& dist, std::size_t n);

/// Canonical blocks with caller-chosen class sizes (the serialized form).
/// `declared_alpha`, when given, must cover the realized deviation.
OutcomePartition partition_from_sizes(const IdealDistribution& dist,
                                      std::vector<std::size_t> sizes,
                                      std::optional<double> declared_alpha = std::nullopt);

/// n = N, Omega_o = {o}, alpha = 0.
OutcomePartition unbiased_partition(std::size_t outcomes);

struct FeasibilityViolation {
  std::size_t party = 0;
  std::size_t outcome = 0;
  double value = 0.0;  // alpha + eps_k |Omega_o|

  std::string describe() const;
};

/// Checks alpha + eps_k |Omega_o| <= 1 for every party and outcome; reports
/// the largest offending term.
std::optional<FeasibilityViolation> check_feasibility(const OutcomePartition& partition,
                                                      std::span<const double> epsilons);

}  // namespace dieroll
