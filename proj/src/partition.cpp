#include "dieroll/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace dieroll {
namespace {

// n * P_o with near-integers snapped, so exact rationals give alpha = 0.
double quota(double p, std::size_t n) {
  const double q = p * static_cast<double>(n);
  const double r = std::round(q);
  return std::abs(q - r) <= 1e-9 * std::max(1.0, q) ? r : q;
}

}  // namespace

IdealDistribution::IdealDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw std::invalid_argument("distribution needs at least two outcomes");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument(fmt::format("probability {} outside [0, 1]", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw std::invalid_argument(fmt::format("probabilities sum to {:.17g}, not 1", sum));
  }
}

IdealDistribution IdealDistribution::uniform(std::size_t outcomes) {
  if (outcomes < 2) throw std::invalid_argument("distribution needs at least two outcomes");
  return IdealDistribution(std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes)));
}

OutcomePartition::OutcomePartition(IdealDistribution ideal, std::vector<std::size_t> sizes,
                                   double alpha)
    : ideal_(std::move(ideal)), sizes_(std::move(sizes)), alpha_(alpha) {
  if (sizes_.size() != ideal_.outcomes()) {
    throw std::invalid_argument(fmt::format("partition has {} classes for {} outcomes",
                                            sizes_.size(), ideal_.outcomes()));
  }
  offsets_.resize(sizes_.size());
  std::exclusive_scan(sizes_.begin(), sizes_.end(), offsets_.begin(), std::size_t{0});
  modulus_ = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
  if (modulus_ < outcomes()) {
    throw std::invalid_argument(fmt::format("n = {} is smaller than N = {}", modulus_, outcomes()));
  }
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
    throw std::invalid_argument("alpha must be finite and non-negative");
  }
  const double realized = realized_deviation();
  if (realized > alpha_ + 1e-15) {
    throw std::invalid_argument(
        fmt::format("alpha {} is below the realized deviation {}", alpha_, realized));
  }
}

std::size_t OutcomePartition::max_class_size() const {
  return *std::max_element(sizes_.begin(), sizes_.end());
}

std::vector<std::size_t> OutcomePartition::members(std::size_t o) const {
  std::vector<std::size_t> out(class_size(o));
  std::iota(out.begin(), out.end(), first_member(o));
  return out;
}

bool OutcomePartition::contains(std::size_t o, std::size_t x) const {
  return x >= first_member(o) && x < first_member(o) + class_size(o);
}

std::size_t OutcomePartition::outcome_of(std::size_t x) const {
  if (x >= modulus_) throw std::out_of_range(fmt::format("{} is not in Z_{}", x, modulus_));
  // upper_bound over block starts; empty classes share a start and are skipped.
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), x);
  return static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
}

double OutcomePartition::realized_deviation() const {
  double worst = 0.0;
  const double n = static_cast<double>(modulus_);
  for (std::size_t o = 0; o < outcomes(); ++o) {
    const double dev = std::abs(static_cast<double>(sizes_[o]) - quota(ideal_[o], modulus_)) / n;
    worst = std::max(worst, dev);
  }
  return worst;
}

OutcomePartition build_partition(const IdealDistribution& dist, std::size_t n) {
  const std::size_t classes = dist.outcomes();
  if (n < classes) {
    throw std::invalid_argument(fmt::format("n = {} is smaller than N = {}", n, classes));
  }
  std::vector<std::size_t> sizes(classes);
  std::vector<double> remainders(classes);
  std::size_t assigned = 0;
  for (std::size_t o = 0; o < classes; ++o) {
    const double q = quota(dist[o], n);
    sizes[o] = static_cast<std::size_t>(std::floor(q));
    remainders[o] = q - std::floor(q);
    assigned += sizes[o];
  }
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t r = 0; assigned < n; ++r) {
    ++sizes[order[r % classes]];
    ++assigned;
  }
  for (std::size_t o = 0; o < classes; ++o) {
    if (sizes[o] == 0 && dist[o] > 0.0) {
      throw std::invalid_argument(fmt::format(
          "n = {} leaves outcome {} (P = {}) with an empty class", n, o, dist[o]));
    }
  }
  OutcomePartition probe(dist, sizes, 1.0);
  return OutcomePartition(dist, std::move(sizes), probe.realized_deviation());
}

OutcomePartition partition_from_sizes(const IdealDistribution& dist,
                                      std::vector<std::size_t> sizes,
                                      std::optional<double> declared_alpha) {
  OutcomePartition probe(dist, sizes, 1.0);
  return OutcomePartition(dist, std::move(sizes),
                          declared_alpha.value_or(probe.realized_deviation()));
}

OutcomePartition unbiased_partition(std::size_t outcomes) {
  if (outcomes < 2) throw std::invalid_argument("unbiased die needs N >= 2");
  return OutcomePartition(IdealDistribution::uniform(outcomes),
                          std::vector<std::size_t>(outcomes, 1), 0.0);
}

std::string FeasibilityViolation::describe() const {
  return fmt::format("alpha + eps_k |Omega_o| = {:.6g} > 1 (k={}, o={})", value, party + 1,
                     outcome);
}

std::optional<FeasibilityViolation> check_feasibility(const OutcomePartition& partition,
                                                      std::span<const double> epsilons) {
  std::optional<FeasibilityViolation> worst;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (epsilons[k] < 0.0) throw std::invalid_argument("epsilon must be non-negative");
    for (std::size_t o = 0; o < partition.outcomes(); ++o) {
      const double value =
          partition.alpha() + epsilons[k] * static_cast<double>(partition.class_size(o));
      if (value > 1.0 && (!worst || value > worst->value)) worst = FeasibilityViolation{k, o, value};
    }
  }
  return worst;
}

}  // namespace dieroll
