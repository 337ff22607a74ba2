#pragma once

// The honest die-rolling protocol: predistribution (stage I), relativistic
// exchange (stage II), verification and outcome (stage III), plus the
// orchestrator that runs any mix of honest and dishonest strategies over the
// causal engine.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dieroll/engine.hpp"
#include "dieroll/partition.hpp"
#include "dieroll/randsource.hpp"
#include "dieroll/spacetime.hpp"

namespace dieroll {

class TimingInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A read of a secure laboratory the reader does not control.
class AccessViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProtocolTiming {
  /// Speed of the intra-party channels C_kk->ki, as a fraction of c.
  double slow_speed = 0.5;
  /// Stage-I draw and copy emission time; defaults to -3 max|c_i - c_j| / slow_speed.
  std::optional<double> predistribution_time;
  /// Each L_ki confirms the copy of m_k back to L_kk; L_kk aborts without it.
  bool confirm_receipt = false;
  /// Per-party offset added to the honest stage-II deadline check. Empty means
  /// zero for everyone; security is only claimed for zero skew.
  std::vector<double> clock_skew;
};

class ProtocolParams {
 public:
  /// Throws std::invalid_argument if the layout is invalid, the epsilon list
  /// does not match M, alpha + eps_k |Omega_o| > 1 for some k, o, or the
  /// timing settings are out of range.
  ProtocolParams(OutcomePartition partition, std::vector<double> epsilons, Layout layout,
                 ProtocolTiming timing = {});

  std::size_t parties() const { return layout_.size(); }
  std::size_t modulus() const { return partition_.modulus(); }
  std::size_t outcomes() const { return partition_.outcomes(); }
  const OutcomePartition& partition() const { return partition_; }
  const std::vector<double>& epsilons() const { return epsilons_; }
  const Layout& layout() const { return layout_; }
  const ProtocolTiming& timing() const { return timing_; }

  /// alpha + max_{k,o} eps_k |Omega_o|.
  double delta() const;

  /// Laboratories sit at the center of their ball.
  Vec3 lab_position(const LabId& lab) const { return layout_.ball(lab.site).center; }
  double channel_speed(ChannelClass channel) const;
  double clock_skew(std::size_t k) const;
  /// Latest accepted reception time at L_kk: t_k plus the party's skew.
  double deadline_check(std::size_t k) const;
  double predistribution_time() const;
  double verification_time() const;
  double final_time() const;

 private:
  OutcomePartition partition_;
  std::vector<double> epsilons_;
  Layout layout_;
  ProtocolTiming timing_;
};

enum class AbortReason { Late, Malformed, Missing, Inconsistent, Channel, Unconfirmed };

const char* to_string(AbortReason reason);

/// A message as planned by a lab: emission at the lab's decision point,
/// reception at the destination lab.
struct Dispatch {
  LabId from;
  LabId to;
  ChannelClass channel = ChannelClass::None;
  Payload payload;
  SpacetimeEvent emitted_at;
  SpacetimeEvent received_at;
};

/// Reception at the destination lab after travel at the channel speed plus
/// `extra_delay`. A negative delay yields a superluminal message that the
/// engine rejects.
Dispatch make_dispatch(const ProtocolParams& params, const LabId& from,
                       const SpacetimeEvent& emitted_at, const LabId& to, ChannelClass channel,
                       Payload payload, double extra_delay = 0.0);

struct Stage1Plan {
  std::int64_t value = 0;
  SpacetimeEvent drawn_at;
  std::vector<Dispatch> copies;  // L_kk -> L_ki for every i != k
};

/// Copies of an already drawn m_k. Throws TimingInfeasible if a copy cannot
/// reach its lab strictly before t = 0.
Stage1Plan honest_stage1(const ProtocolParams& params, std::size_t instance, std::size_t k,
                         std::int64_t m_k);

/// Draws m_k from `source` and plans the copies. Throws std::invalid_argument
/// if the source is over the wrong Z_n or exceeds the declared eps_k.
Stage1Plan honest_stage1(const ProtocolParams& params, std::size_t instance, std::size_t k,
                         const SourceModel& source, EntropyStream& entropy);

/// Fast messages L_ki -> L_ii for i != k, emitted at t = 0 inside B_i.
std::vector<Dispatch> honest_stage2(const ProtocolParams& params, std::size_t instance,
                                    std::size_t k, std::int64_t m_k);

struct Reception {
  std::size_t sender = 0;
  Payload payload;
  SpacetimeEvent at;
};

struct Stage2Verdict {
  /// m_1..m_M as known to party k; meaningful only without abort.
  std::vector<std::int64_t> values;
  std::optional<AbortReason> abort;
  std::size_t culprit = 0;
};

/// Acceptance of the stage-II messages at L_kk. For each i != k the earliest
/// message from party i must arrive inside B_k no later than the deadline
/// check and carry a single value in Z_n.
Stage2Verdict honest_stage2_accept(const ProtocolParams& params, std::size_t k, std::int64_t m_k,
                                   std::span<const Reception> received);

struct Stage3Verdict {
  std::optional<AbortReason> abort;
  std::size_t culprit = 0;
};

/// Compares party k's table with every report; `reports[i]` is the table
/// L_ii sent to L_kk (nullopt if none arrived). A missing or malformed report
/// aborts with Channel; a differing m_j, j not in {k, i}, with Inconsistent.
Stage3Verdict honest_stage3(const ProtocolParams& params, std::size_t k,
                            std::span<const std::int64_t> own_values,
                            std::span<const std::optional<Payload>> reports);

/// x = sum m_k mod n, and the o with x in Omega_o.
std::size_t compute_outcome(const OutcomePartition& partition,
                            std::span<const std::int64_t> messages);
std::int64_t sum_mod(std::span<const std::int64_t> messages, std::size_t n);

// ---------------------------------------------------------------------------
// Randomness supplied to a run.

class Randomness {
 public:
  virtual ~Randomness() = default;
  /// The honest draw of the party whose home lab is `home`.
  virtual std::int64_t draw(const LabId& home, const SourceModel& source) = 0;
  /// Index into the coalition's shared-randomness distribution.
  virtual std::size_t shared(std::span<const double> distribution) = 0;
};

/// Seeded streams: one per (instance, party) and one for the coalition.
class StreamRandomness final : public Randomness {
 public:
  explicit StreamRandomness(std::uint64_t seed) : seed_(seed) {}

  std::int64_t draw(const LabId& home, const SourceModel& source) override;
  std::size_t shared(std::span<const double> distribution) override;

 private:
  EntropyStream& stream(std::uint64_t index);

  std::uint64_t seed_;
  std::map<std::uint64_t, EntropyStream> streams_;
};

/// Fixed draws for exhaustive enumeration.
class FixedRandomness final : public Randomness {
 public:
  FixedRandomness(std::map<std::pair<std::size_t, std::size_t>, std::int64_t> draws,
                  std::size_t shared)
      : draws_(std::move(draws)), shared_(shared) {}

  std::int64_t draw(const LabId& home, const SourceModel& source) override;
  std::size_t shared(std::span<const double> distribution) override;

 private:
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> draws_;
  std::size_t shared_;
};

// ---------------------------------------------------------------------------
// Strategies and the view they decide through.

struct EventHandle {
  EventId id = 0;
  EventKind kind = EventKind::Draw;
  LabId lab;
  SpacetimeEvent at;
  ChannelClass channel = ChannelClass::None;
  std::optional<LabId> peer;
};

class Session;

/// What one laboratory can do at one decision point. Payloads are only
/// available through read(), which enforces access to the reader's own
/// laboratories and causal admissibility; every read becomes a cause of the
/// events the decision emits.
class LabView {
 public:
  LabView(Session& session, LabId lab, SpacetimeEvent at);

  const LabId& lab() const { return lab_; }
  const SpacetimeEvent& at() const { return at_; }
  const ProtocolParams& params() const;
  const ProtocolParams& params(std::size_t instance) const;
  std::size_t instances() const;
  /// Whether the role is played by the reader's side (itself, or the
  /// coalition for dishonest readers).
  bool controls(std::size_t instance, std::size_t party) const;
  bool honest(std::size_t instance, std::size_t party) const;
  std::size_t shared_randomness() const;

  /// Metadata of committed events at laboratories this side controls,
  /// including ones outside the past light cone.
  std::vector<EventHandle> own_events() const;
  /// own_events() restricted to the closed past light cone of at().
  std::vector<EventHandle> visible_events() const;
  /// Throws AccessViolation or CausalityViolation before revealing anything.
  const Payload& read(EventId id);

  /// Honest draw of this lab's party; only valid at its home laboratory.
  std::int64_t draw(const SourceModel& source);
  void send(const Dispatch& dispatch);
  void abort(AbortReason reason, std::size_t culprit);
  void conclude(std::int64_t x, std::size_t outcome, std::span<const std::int64_t> values);

 private:
  Session& session_;
  LabId lab_;
  SpacetimeEvent at_;
  std::vector<EventId> reads_;
};

struct RoleRef {
  std::size_t instance = 0;
  std::size_t party = 0;
};

/// A party's decision policies. Every hook is const: policies keep no state
/// across calls and are safe to share between concurrent runs.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::string name() const = 0;
  virtual bool honest() const { return false; }
  /// The generator R_k of an honest party.
  virtual const SourceModel* source() const { return nullptr; }
  /// Distribution of the coalition's pre-shared value r.
  virtual std::vector<double> shared_distribution() const { return {1.0}; }

  /// Stage I at L_kk.
  virtual void predistribute(LabView&) const {}
  /// At L_ki when its copy of m_k arrives (reception-confirmation variant).
  virtual void acknowledge(LabView&) const {}
  /// Where and when L_ki takes its stage-II decision.
  virtual SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef role,
                                        std::size_t site, std::size_t shared) const;
  /// Stage II at L_ki, i != k.
  virtual void deliver(LabView& view, std::size_t site) const = 0;
  /// Stage III start at L_kk: acceptance and table broadcast.
  virtual void verify(LabView&) const {}
  /// At L_kk when party `requester`'s table arrives.
  virtual void respond(LabView&, std::size_t /*requester*/) const {}
  /// Stage III end at L_kk: comparison and outcome.
  virtual void finalize(LabView&) const {}
};

using StrategyPtr = std::shared_ptr<const Strategy>;

struct Message {
  LabId from;
  LabId to;
  ChannelClass channel = ChannelClass::None;
  Payload payload;
  SpacetimeEvent emitted_at;
  SpacetimeEvent received_at;
  EventId emit_id = 0;
  EventId receive_id = 0;
};

struct LabAbort {
  LabId lab;
  AbortReason reason = AbortReason::Missing;
  std::size_t culprit = 0;
};

struct Transcript {
  std::shared_ptr<const ProtocolParams> params;
  std::size_t instance = 0;
  std::vector<Message> messages;  // in emission order
  std::vector<LabAbort> aborts;
  /// Values m_1..m_M accepted in stage II, per honest party that concluded.
  std::map<std::size_t, std::vector<std::int64_t>> accepted;
  std::optional<std::int64_t> x;
  std::optional<std::size_t> outcome;  // nullopt iff some lab aborted

  bool aborted() const { return !outcome.has_value(); }
};

/// Line-oriented log: one record per message, one per abort, one footer.
std::string serialize_transcript(const Transcript& transcript);

struct InstanceSpec {
  std::shared_ptr<const ProtocolParams> params;
  std::vector<StrategyPtr> roles;  // one per party
};

struct SessionResult {
  RunState state;
  std::vector<Transcript> transcripts;
};

/// Runs parallel protocol instances over one causal engine. Every dishonest
/// role in the session must share a single Strategy object (the coalition),
/// and each instance needs at least one honest party. Decisions execute in
/// frame-time order. Throws CausalityViolation or AccessViolation when a
/// strategy reaches outside what physics and ownership allow.
SessionResult run_session(std::span<const InstanceSpec> instances, Randomness& randomness);

Transcript run_protocol(std::shared_ptr<const ProtocolParams> params,
                        std::span<const StrategyPtr> strategies, Randomness& randomness);

}  // namespace dieroll
