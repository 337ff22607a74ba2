#include "dieroll/strategies.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace dieroll {

namespace {

// Earliest reception at `lab` on `channel`, optionally from a given sender
// lab, among events visible to the view and no later than `cutoff`.
std::optional<EventHandle> first_reception(
    const LabView& view, const LabId& lab, ChannelClass channel,
    std::optional<LabId> sender = std::nullopt,
    double cutoff = std::numeric_limits<double>::infinity()) {
  std::optional<EventHandle> best;
  for (const auto& e : view.visible_events()) {
    if (e.kind != EventKind::Receive || e.lab != lab || e.channel != channel) continue;
    if (sender && e.peer != sender) continue;
    if (e.at.t > cutoff) continue;
    if (!best || e.at.t < best->at.t) best = e;
  }
  return best;
}

void deliver_value(LabView& view, std::size_t site, std::int64_t value) {
  const LabId& lab = view.lab();
  view.send(make_dispatch(view.params(), lab, view.at(), LabId{lab.instance, site, site},
                          ChannelClass::FastInterParty, {value}));
}

std::optional<std::size_t> lowest_dishonest(const LabView& view) {
  const std::size_t inst = view.lab().instance;
  for (std::size_t p = 0; p < view.params().parties(); ++p) {
    if (!view.honest(inst, p)) return p;
  }
  return std::nullopt;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return derive_seed(h, v); }

// ---------------------------------------------------------------------------

class Honest final : public Strategy {
 public:
  explicit Honest(SourceModel source) : source_(std::move(source)) {}

  std::string name() const override { return "honest"; }
  bool honest() const override { return true; }
  const SourceModel* source() const override { return &source_; }

  void predistribute(LabView& view) const override {
    const LabId& lab = view.lab();
    const std::int64_t m = view.draw(source_);
    for (const auto& copy : honest_stage1(view.params(), lab.instance, lab.owner, m).copies) {
      view.send(copy);
    }
  }

  void acknowledge(LabView& view) const override {
    const LabId& lab = view.lab();
    auto copy = first_reception(view, lab, ChannelClass::SlowIntraParty);
    if (!copy) return;
    Payload value = view.read(copy->id);
    view.send(make_dispatch(view.params(), lab, view.at(), LabId{lab.instance, lab.owner, lab.owner},
                            ChannelClass::Confirmation, std::move(value)));
  }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    auto copy = first_reception(view, lab, ChannelClass::SlowIntraParty);
    if (!copy) return;
    const Payload& value = view.read(copy->id);
    for (const auto& d : honest_stage2(view.params(), lab.instance, lab.owner, value.at(0))) {
      if (d.from.site == site) view.send(d);
    }
  }

  void verify(LabView& view) const override {
    const auto verdict = accept(view);
    if (verdict.abort) {
      view.abort(*verdict.abort, verdict.culprit);
      return;
    }
    const LabId& lab = view.lab();
    for (std::size_t i = 0; i < view.params().parties(); ++i) {
      if (i == lab.owner) continue;
      view.send(make_dispatch(view.params(), lab, view.at(), LabId{lab.instance, i, i},
                              ChannelClass::Verification, verdict.values));
    }
  }

  void finalize(LabView& view) const override {
    const LabId& lab = view.lab();
    for (const auto& e : view.own_events()) {
      if (e.kind == EventKind::Abort && e.lab == lab) return;
    }
    const auto verdict = accept(view);
    if (verdict.abort) {
      view.abort(*verdict.abort, verdict.culprit);
      return;
    }
    const ProtocolParams& params = view.params();
    std::vector<std::optional<Payload>> reports(params.parties());
    for (std::size_t i = 0; i < params.parties(); ++i) {
      if (i == lab.owner) continue;
      auto r = first_reception(view, lab, ChannelClass::Verification, LabId{lab.instance, i, i});
      if (r) reports[i] = view.read(r->id);
    }
    const auto check = honest_stage3(params, lab.owner, verdict.values, reports);
    if (check.abort) {
      view.abort(*check.abort, check.culprit);
      return;
    }
    const std::int64_t x = sum_mod(verdict.values, params.modulus());
    view.conclude(x, params.partition().outcome_of(static_cast<std::size_t>(x)), verdict.values);
  }

 private:
  // Stage-II acceptance at the home lab, restricted to what had arrived by
  // the verification time.
  static Stage2Verdict accept(LabView& view) {
    const LabId& lab = view.lab();
    const ProtocolParams& params = view.params();
    const double cutoff = params.verification_time();
    std::int64_t own = 0;
    bool drew = false;
    for (const auto& e : view.own_events()) {
      if (e.kind == EventKind::Draw && e.lab == lab) {
        own = view.read(e.id).at(0);
        drew = true;
        break;
      }
    }
    if (!drew) throw std::logic_error(fmt::format("{} has no stage-I draw", lab.str()));

    if (params.timing().confirm_receipt) {
      for (std::size_t i = 0; i < params.parties(); ++i) {
        if (i == lab.owner) continue;
        auto ack = first_reception(view, lab, ChannelClass::Confirmation,
                                   LabId{lab.instance, lab.owner, i}, cutoff);
        if (!ack || view.read(ack->id) != Payload{own}) {
          return Stage2Verdict{{}, AbortReason::Unconfirmed, lab.owner};
        }
      }
    }

    std::vector<Reception> received;
    for (const auto& e : view.visible_events()) {
      if (e.kind != EventKind::Receive || e.lab != lab ||
          e.channel != ChannelClass::FastInterParty || e.at.t > cutoff || !e.peer) {
        continue;
      }
      received.push_back(Reception{e.peer->owner, view.read(e.id), e.at});
    }
    return honest_stage2_accept(params, lab.owner, own, received);
  }

  SourceModel source_;
};

// Dishonest roles answer a verification request by echoing the requester's
// own table, which always passes its comparison.
class Adversary : public Strategy {
 public:
  void respond(LabView& view, std::size_t requester) const override {
    const LabId& lab = view.lab();
    const LabId peer{lab.instance, requester, requester};
    auto r = first_reception(view, lab, ChannelClass::Verification, peer);
    if (!r) return;
    Payload table = view.read(r->id);
    view.send(make_dispatch(view.params(), lab, view.at(), peer, ChannelClass::Verification,
                            std::move(table)));
  }
};

class Shift final : public Adversary {
 public:
  Shift(std::size_t shift, bool minimizing) : shift_(shift), minimizing_(minimizing) {}

  std::string name() const override {
    return fmt::format("{}_shift(c={})", minimizing_ ? "minimizing" : "optimal", shift_);
  }

  void deliver(LabView& view, std::size_t site) const override {
    const bool leader = lowest_dishonest(view) == view.lab().owner;
    deliver_value(view, site, leader ? static_cast<std::int64_t>(shift_) : 0);
  }

 private:
  std::size_t shift_;
  bool minimizing_;
};

class MitmRelay final : public Adversary {
 public:
  MitmRelay(std::size_t n, std::optional<double> delay) : n_(n), delay_(delay) {
    if (n_ == 0) throw std::invalid_argument("mitm relay needs n >= 1");
  }

  std::string name() const override { return "mitm_relay"; }

  std::vector<double> shared_distribution() const override {
    return std::vector<double>(n_, 1.0 / static_cast<double>(n_));
  }

  SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef, std::size_t site,
                                std::size_t) const override {
    double delay = std::numeric_limits<double>::infinity();
    if (delay_) {
      delay = *delay_;
    } else {
      for (std::size_t i = 0; i < params.parties(); ++i) {
        delay = std::min(delay, params.layout().deadline(i) / 100.0);
      }
    }
    return SpacetimeEvent{delay, params.layout().ball(site).center};
  }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    const std::size_t role = lab.owner;
    for (std::size_t other = 0; other < view.instances(); ++other) {
      if (other == lab.instance || role >= view.params(other).parties() ||
          !view.honest(other, role)) {
        continue;
      }
      // The honest player of this role in the other instance delivered into
      // B_site; relay what arrived there. Search all owned events, so that a
      // relay scheduled before the reception surfaces as a causality error.
      for (const auto& e : view.own_events()) {
        if (e.kind == EventKind::Receive && e.lab.instance == other && e.lab.site == site &&
            e.channel == ChannelClass::FastInterParty && e.peer && e.peer->owner == role) {
          deliver_value(view, site, view.read(e.id).at(0));
          return;
        }
      }
    }
    deliver_value(view, site,
                  static_cast<std::int64_t>(view.shared_randomness() % view.params().modulus()));
  }

 private:
  std::size_t n_;
  std::optional<double> delay_;
};

class RandomAdmissible final : public Adversary {
 public:
  explicit RandomAdmissible(std::uint64_t seed) : seed_(seed) {}

  std::string name() const override { return fmt::format("random_admissible({})", seed_); }

  std::vector<double> shared_distribution() const override {
    const std::size_t size = 1 + mix(seed_, 1) % 3;
    std::vector<double> w(size);
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      w[i] = 1.0 + static_cast<double>(mix(seed_, 100 + i) % 1000);
      total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
  }

  SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef role, std::size_t site,
                                std::size_t shared) const override {
    std::uint64_t h = mix(seed_, 2);
    for (std::uint64_t v : {role.instance, role.party, site, shared}) h = mix(h, v);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    const double lo = -params.layout().max_center_distance();
    const double hi = params.layout().deadline(site);
    return SpacetimeEvent{lo + u * (hi - lo), params.layout().ball(site).center};
  }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    std::uint64_t h = mix(seed_, 3);
    for (std::uint64_t v : {lab.instance, lab.owner, view.shared_randomness()}) h = mix(h, v);
    for (const auto& e : view.visible_events()) {
      for (std::int64_t v : view.read(e.id)) h = mix(h, static_cast<std::uint64_t>(v));
    }
    deliver_value(view, site, static_cast<std::int64_t>(h % view.params().modulus()));
  }

 private:
  std::uint64_t seed_;
};

class InconsistentBroadcast final : public Adversary {
 public:
  std::string name() const override { return "inconsistent_broadcast"; }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    if (lowest_dishonest(view) != lab.owner || !view.honest(lab.instance, site)) {
      deliver_value(view, site, 0);
      return;
    }
    std::int64_t rank = 0;
    for (std::size_t p = 0; p < site; ++p) rank += view.honest(lab.instance, p) ? 1 : 0;
    deliver_value(view, site, rank % static_cast<std::int64_t>(view.params().modulus()));
  }
};

class Silent final : public Adversary {
 public:
  std::string name() const override { return "silent"; }
  void deliver(LabView&, std::size_t) const override {}
};

class Scripted final : public Adversary {
 public:
  Scripted(std::int64_t value, std::optional<double> offset) : value_(value), offset_(offset) {}

  std::string name() const override { return fmt::format("scripted({})", value_); }

  SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef, std::size_t site,
                                std::size_t) const override {
    const double t = offset_ ? params.layout().deadline(site) + *offset_ : 0.0;
    return SpacetimeEvent{t, params.layout().ball(site).center};
  }

  void deliver(LabView& view, std::size_t site) const override {
    deliver_value(view, site, value_);
  }

 private:
  std::int64_t value_;
  std::optional<double> offset_;
};

class SpacelikePeek final : public Adversary {
 public:
  std::string name() const override { return "spacelike_peek"; }

  SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef, std::size_t site,
                                std::size_t) const override {
    return SpacetimeEvent{params.layout().deadline(site) / 2.0, params.layout().ball(site).center};
  }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    if (view.honest(lab.instance, site)) {
      for (const auto& e : view.own_events()) {
        if (e.kind == EventKind::Receive && e.channel == ChannelClass::FastInterParty && e.peer &&
            e.peer->owner == site && view.honest(e.peer->instance, e.peer->owner)) {
          deliver_value(view, site, view.read(e.id).at(0));
          return;
        }
      }
    }
    deliver_value(view, site, 0);
  }
};

class LateAdaptive final : public Adversary {
 public:
  explicit LateAdaptive(std::size_t target) : target_(target) {}

  std::string name() const override { return fmt::format("late_adaptive({})", target_); }

  SpacetimeEvent delivery_point(const ProtocolParams& params, RoleRef, std::size_t site,
                                std::size_t) const override {
    return SpacetimeEvent{params.deadline_check(site), params.layout().ball(site).center};
  }

  void deliver(LabView& view, std::size_t site) const override {
    const LabId& lab = view.lab();
    const ProtocolParams& params = view.params();
    const auto n = static_cast<std::int64_t>(params.modulus());
    if (lowest_dishonest(view) != lab.owner) {
      deliver_value(view, site, 0);
      return;
    }
    // Sum of visible honest messages; steer only if all of them are known.
    std::int64_t honest_sum = 0;
    std::size_t seen = 0;
    std::size_t honest_count = 0;
    for (std::size_t p = 0; p < params.parties(); ++p) {
      if (!view.honest(lab.instance, p)) continue;
      ++honest_count;
      for (const auto& e : view.visible_events()) {
        if (e.kind == EventKind::Receive && e.lab.instance == lab.instance &&
            e.channel == ChannelClass::FastInterParty && e.peer && e.peer->owner == p) {
          honest_sum += view.read(e.id).at(0);
          ++seen;
          break;
        }
      }
    }
    std::int64_t value = 0;
    if (seen == honest_count && target_ < params.outcomes()) {
      const auto goal = static_cast<std::int64_t>(params.partition().first_member(target_));
      value = ((goal - honest_sum) % n + n) % n;
    }
    deliver_value(view, site, value);
  }

 private:
  std::size_t target_;
};

ShiftAttack shift_attack(const ProtocolParams& params, std::size_t honest_k,
                         const SourceModel& source, std::size_t target, bool minimizing) {
  if (honest_k >= params.parties()) throw std::invalid_argument("honest party out of range");
  if (target >= params.outcomes()) throw std::invalid_argument("target outcome out of range");
  if (source.modulus() != params.modulus()) {
    throw std::invalid_argument("honest source is over the wrong Z_n");
  }
  const std::size_t n = params.modulus();
  std::size_t best = 0;
  double best_p = shift_probability(params.partition(), source, target, 0);
  for (std::size_t c = 1; c < n; ++c) {
    const double p = shift_probability(params.partition(), source, target, c);
    if (minimizing ? p < best_p : p > best_p) {
      best = c;
      best_p = p;
    }
  }
  const double size = static_cast<double>(params.partition().class_size(target));
  const double inv_n = 1.0 / static_cast<double>(n);
  const double eps = params.epsilons()[honest_k];
  AttackReport report{honest_k, target, best_p,
                      (minimizing ? inv_n - eps : inv_n + eps) * size, best, minimizing};
  return {std::make_shared<Shift>(best, minimizing), report};
}

}  // namespace

StrategyPtr honest_strategy(SourceModel source) {
  return std::make_shared<Honest>(std::move(source));
}

double shift_probability(const OutcomePartition& partition, const SourceModel& honest_source,
                         std::size_t target, std::size_t shift) {
  const std::size_t n = partition.modulus();
  double p = 0.0;
  for (std::size_t x : partition.members(target)) p += honest_source.prob((x + n - shift % n) % n);
  return p;
}

ShiftAttack optimal_shift_attack(const ProtocolParams& params, std::size_t honest_k,
                                 const SourceModel& honest_source, std::size_t target) {
  return shift_attack(params, honest_k, honest_source, target, false);
}

ShiftAttack minimizing_shift_attack(const ProtocolParams& params, std::size_t honest_k,
                                    const SourceModel& honest_source, std::size_t target) {
  return shift_attack(params, honest_k, honest_source, target, true);
}

StrategyPtr mitm_relay(std::size_t n, std::optional<double> relay_delay) {
  return std::make_shared<MitmRelay>(n, relay_delay);
}

std::pair<StrategyPtr, StrategyPtr> same_role_countermeasure(SourceModel first,
                                                             SourceModel second) {
  return {honest_strategy(std::move(first)), honest_strategy(std::move(second))};
}

StrategyPtr random_admissible(std::uint64_t seed) {
  return std::make_shared<RandomAdmissible>(seed);
}

StrategyPtr inconsistent_broadcast() { return std::make_shared<InconsistentBroadcast>(); }

StrategyPtr silent_strategy() { return std::make_shared<Silent>(); }

StrategyPtr scripted_delivery(std::int64_t value, std::optional<double> deadline_offset) {
  return std::make_shared<Scripted>(value, deadline_offset);
}

StrategyPtr spacelike_peek() { return std::make_shared<SpacelikePeek>(); }

StrategyPtr late_adaptive(std::size_t target) { return std::make_shared<LateAdaptive>(target); }

}  // namespace dieroll
