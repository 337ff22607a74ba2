#pragma once

// Honest behavior and the built-in adversaries. Dishonest roles of a session
// are played by one coalition object; its labs can read one another's events
// but only inside their past light cones.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "dieroll/protocol.hpp"

namespace dieroll {

StrategyPtr honest_strategy(SourceModel source);

struct AttackReport {
  std::size_t honest_party = 0;
  std::size_t target = 0;
  double achieved = 0.0;
  /// (1/n + eps_k)|Omega_o*| for the maximizing attack, (1/n - eps_k)|Omega_o*|
  /// for the minimizing one.
  double bound = 0.0;
  std::size_t shift = 0;
  bool minimizing = false;
};

struct ShiftAttack {
  StrategyPtr strategy;
  AttackReport report;
};

/// Sum over x in Omega_target of P_k((x - c) mod n).
double shift_probability(const OutcomePartition& partition, const SourceModel& honest_source,
                         std::size_t target, std::size_t shift);

/// The colluding parties make their messages sum to the shift c that
/// maximizes the honest party's chance of landing in Omega_target. Throws
/// std::invalid_argument unless `honest_source` is over Z_n and the indices
/// are in range.
ShiftAttack optimal_shift_attack(const ProtocolParams& params, std::size_t honest_k,
                                 const SourceModel& honest_source, std::size_t target);
ShiftAttack minimizing_shift_attack(const ProtocolParams& params, std::size_t honest_k,
                                    const SourceModel& honest_source, std::size_t target);

/// Coalition that plays in two parallel instances and copies honest messages
/// from one into the other, so that x = x'. Needs the modulus for its shared
/// value, used for roles with nothing to relay. Relays are decided
/// `relay_delay` after t = 0 (default min_i t_i / 100); a negative delay
/// makes the relay superluminal.
StrategyPtr mitm_relay(std::size_t n, std::optional<double> relay_delay = std::nullopt);

/// The honest party plays role k in both instances with independent draws.
std::pair<StrategyPtr, StrategyPtr> same_role_countermeasure(SourceModel first,
                                                             SourceModel second);

/// A deterministic pseudo-random function of the seed, the shared value and
/// everything visible at a pseudo-random decision point inside the window.
StrategyPtr random_admissible(std::uint64_t seed);

/// The lowest dishonest party sends a different value to every honest party.
StrategyPtr inconsistent_broadcast();

/// Never delivers in stage II.
StrategyPtr silent_strategy();

/// Delivers `value` to every site, at t = 0 or, if given, at the site's
/// deadline plus `deadline_offset`.
StrategyPtr scripted_delivery(std::int64_t value,
                              std::optional<double> deadline_offset = std::nullopt);

/// Tries to read an honest stage-II message before it could have arrived.
StrategyPtr spacelike_peek();

/// Decides at the honest party's skewed deadline, steering x into
/// Omega_target whenever the honest message has become visible.
StrategyPtr late_adaptive(std::size_t target);

}  // namespace dieroll
