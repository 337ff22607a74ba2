#include "dieroll/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dieroll {

// ---------------------------------------------------------------------------
// Parameters

ProtocolParams::ProtocolParams(OutcomePartition partition, std::vector<double> epsilons,
                               Layout layout, ProtocolTiming timing)
    : partition_(std::move(partition)),
      epsilons_(std::move(epsilons)),
      layout_(std::move(layout)),
      timing_(std::move(timing)) {
  if (epsilons_.size() != layout_.size()) {
    throw std::invalid_argument(fmt::format("{} epsilons for {} parties", epsilons_.size(),
                                            layout_.size()));
  }
  for (double e : epsilons_) {
    if (!std::isfinite(e) || e < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  }
  if (auto violations = validate_layout(layout_); !violations.empty()) {
    throw std::invalid_argument("invalid layout: " + violations.front().describe());
  }
  if (auto bad = check_feasibility(partition_, epsilons_)) {
    throw std::invalid_argument("infeasible parameters: " + bad->describe());
  }
  if (!(timing_.slow_speed > 0.0 && timing_.slow_speed <= 1.0)) {
    throw std::invalid_argument("slow channel speed must lie in (0, 1]");
  }
  if (!timing_.clock_skew.empty() && timing_.clock_skew.size() != parties()) {
    throw std::invalid_argument("clock skew needs one entry per party");
  }
  for (double s : timing_.clock_skew) {
    if (!std::isfinite(s)) throw std::invalid_argument("clock skew must be finite");
  }
  if (timing_.predistribution_time && !std::isfinite(*timing_.predistribution_time)) {
    throw std::invalid_argument("predistribution time must be finite");
  }
}

double ProtocolParams::delta() const {
  double worst = 0.0;
  for (double e : epsilons_) worst = std::max(worst, e * static_cast<double>(partition_.max_class_size()));
  return partition_.alpha() + worst;
}

double ProtocolParams::channel_speed(ChannelClass channel) const {
  return channel == ChannelClass::SlowIntraParty ? timing_.slow_speed : 1.0;
}

double ProtocolParams::clock_skew(std::size_t k) const {
  return timing_.clock_skew.empty() ? 0.0 : timing_.clock_skew.at(k);
}

double ProtocolParams::deadline_check(std::size_t k) const {
  return layout_.deadline(k) + clock_skew(k);
}

double ProtocolParams::predistribution_time() const {
  if (timing_.predistribution_time) return *timing_.predistribution_time;
  return -3.0 * layout_.max_center_distance() / timing_.slow_speed;
}

double ProtocolParams::verification_time() const {
  double latest = 0.0;
  for (std::size_t k = 0; k < parties(); ++k) {
    latest = std::max(latest, layout_.deadline(k) + std::max(0.0, clock_skew(k)));
  }
  return latest + layout_.max_center_distance();
}

double ProtocolParams::final_time() const {
  return verification_time() + 3.0 * layout_.max_center_distance();
}

const char* to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::Late: return "late";
    case AbortReason::Malformed: return "malformed";
    case AbortReason::Missing: return "missing";
    case AbortReason::Inconsistent: return "inconsistent";
    case AbortReason::Channel: return "channel";
    case AbortReason::Unconfirmed: return "unconfirmed";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Honest stages

Dispatch make_dispatch(const ProtocolParams& params, const LabId& from,
                       const SpacetimeEvent& emitted_at, const LabId& to, ChannelClass channel,
                       Payload payload, double extra_delay) {
  const Vec3 dest = params.lab_position(to);
  const double travel = distance(emitted_at.pos, dest) / params.channel_speed(channel);
  return Dispatch{from,       to,       channel, std::move(payload),
                  emitted_at, SpacetimeEvent{emitted_at.t + travel + extra_delay, dest}};
}

Stage1Plan honest_stage1(const ProtocolParams& params, std::size_t instance, std::size_t k,
                         std::int64_t m_k) {
  if (k >= params.parties()) throw std::out_of_range("party index out of range");
  const LabId home{instance, k, k};
  Stage1Plan plan;
  plan.value = m_k;
  plan.drawn_at = SpacetimeEvent{params.predistribution_time(), params.lab_position(home)};
  for (std::size_t i = 0; i < params.parties(); ++i) {
    if (i == k) continue;
    const LabId site_lab{instance, k, i};
    Dispatch copy = make_dispatch(params, home, plan.drawn_at, site_lab,
                                  ChannelClass::SlowIntraParty, {m_k});
    if (!(copy.received_at.t < 0.0)) {
      throw TimingInfeasible(fmt::format(
          "copy of m_{} emitted at t={:.6g} reaches {} at t={:.6g}; arriving before t=0 would "
          "need speed {:.6g} > {:.6g}",
          k + 1, plan.drawn_at.t, site_lab.str(), copy.received_at.t,
          plan.drawn_at.t < 0.0 ? params.layout().center_distance(k, i) / -plan.drawn_at.t
                                : INFINITY,
          params.timing().slow_speed));
    }
    plan.copies.push_back(std::move(copy));
  }
  return plan;
}

namespace {

void check_source(const ProtocolParams& params, std::size_t k, const SourceModel& source) {
  if (source.modulus() != params.modulus()) {
    throw std::invalid_argument(fmt::format("party {} source is over Z_{}, protocol uses Z_{}",
                                            k + 1, source.modulus(), params.modulus()));
  }
  if (source.epsilon() > params.epsilons().at(k) + 1e-15) {
    throw std::invalid_argument(fmt::format("party {} source epsilon {:.6g} exceeds eps_k {:.6g}",
                                            k + 1, source.epsilon(), params.epsilons()[k]));
  }
}

}  // namespace

Stage1Plan honest_stage1(const ProtocolParams& params, std::size_t instance, std::size_t k,
                         const SourceModel& source, EntropyStream& entropy) {
  check_source(params, k, source);
  return honest_stage1(params, instance, k, static_cast<std::int64_t>(sample(source, entropy)));
}

std::vector<Dispatch> honest_stage2(const ProtocolParams& params, std::size_t instance,
                                    std::size_t k, std::int64_t m_k) {
  std::vector<Dispatch> out;
  for (std::size_t i = 0; i < params.parties(); ++i) {
    if (i == k) continue;
    const LabId from{instance, k, i};
    const SpacetimeEvent at{0.0, params.lab_position(from)};
    out.push_back(make_dispatch(params, from, at, LabId{instance, i, i},
                                ChannelClass::FastInterParty, {m_k}));
  }
  return out;
}

Stage2Verdict honest_stage2_accept(const ProtocolParams& params, std::size_t k, std::int64_t m_k,
                                   std::span<const Reception> received) {
  Stage2Verdict verdict;
  verdict.values.assign(params.parties(), 0);
  verdict.values[k] = m_k;
  const Ball& home = params.layout().ball(k);
  const auto n = static_cast<std::int64_t>(params.modulus());
  for (std::size_t i = 0; i < params.parties(); ++i) {
    if (i == k) continue;
    const Reception* first = nullptr;
    for (const auto& r : received) {
      if (r.sender == i && (!first || r.at.t < first->at.t)) first = &r;
    }
    std::optional<AbortReason> reason;
    if (!first || !home.contains(first->at.pos)) {
      reason = AbortReason::Missing;
    } else if (first->at.t > params.deadline_check(k) + kGeomTolerance) {
      reason = AbortReason::Late;
    } else if (first->payload.size() != 1 || first->payload[0] < 0 || first->payload[0] >= n) {
      reason = AbortReason::Malformed;
    } else {
      verdict.values[i] = first->payload[0];
    }
    if (reason && !verdict.abort) {
      verdict.abort = reason;
      verdict.culprit = i;
    }
  }
  return verdict;
}

Stage3Verdict honest_stage3(const ProtocolParams& params, std::size_t k,
                            std::span<const std::int64_t> own_values,
                            std::span<const std::optional<Payload>> reports) {
  const std::size_t m = params.parties();
  if (own_values.size() != m || reports.size() != m) {
    throw std::invalid_argument("stage III needs one value and one report slot per party");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (i == k) continue;
    const auto& report = reports[i];
    if (!report || report->size() != m) return {AbortReason::Channel, i};
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k || j == i) continue;
      if ((*report)[j] != own_values[j]) return {AbortReason::Inconsistent, j};
    }
  }
  return {};
}

std::int64_t sum_mod(std::span<const std::int64_t> messages, std::size_t n) {
  const auto mod = static_cast<std::int64_t>(n);
  std::int64_t x = 0;
  for (std::int64_t m : messages) {
    if (m < 0 || m >= mod) throw std::out_of_range(fmt::format("{} is not in Z_{}", m, n));
    x = (x + m) % mod;
  }
  return x;
}

std::size_t compute_outcome(const OutcomePartition& partition,
                            std::span<const std::int64_t> messages) {
  return partition.outcome_of(static_cast<std::size_t>(sum_mod(messages, partition.modulus())));
}

// ---------------------------------------------------------------------------
// Randomness

EntropyStream& StreamRandomness::stream(std::uint64_t index) {
  auto it = streams_.find(index);
  if (it == streams_.end()) it = streams_.emplace(index, EntropyStream(derive_seed(seed_, index))).first;
  return it->second;
}

std::int64_t StreamRandomness::draw(const LabId& home, const SourceModel& source) {
  const std::uint64_t index = 1 + home.instance * 4096 + home.owner;
  return static_cast<std::int64_t>(sample(source, stream(index)));
}

std::size_t StreamRandomness::shared(std::span<const double> distribution) {
  if (distribution.size() <= 1) return 0;
  return sample(SourceModel::tight({distribution.begin(), distribution.end()}), stream(0));
}

std::int64_t FixedRandomness::draw(const LabId& home, const SourceModel&) {
  auto it = draws_.find({home.instance, home.owner});
  if (it == draws_.end()) {
    throw std::out_of_range(fmt::format("no fixed draw for party {} of instance {}",
                                        home.owner + 1, home.instance));
  }
  return it->second;
}

std::size_t FixedRandomness::shared(std::span<const double> distribution) {
  if (shared_ >= distribution.size()) throw std::out_of_range("fixed shared value out of range");
  return shared_;
}

// ---------------------------------------------------------------------------
// Session

class Session {
 public:
  Session(std::span<const InstanceSpec> instances, Randomness& randomness)
      : instances_(instances), randomness_(randomness) {
    if (instances_.empty()) throw std::invalid_argument("session needs an instance");
    const Layout& first = instances_.front().params->layout();
    for (std::size_t inst = 0; inst < instances_.size(); ++inst) {
      const auto& spec = instances_[inst];
      if (!spec.params) throw std::invalid_argument("instance without parameters");
      if (spec.roles.size() != spec.params->parties()) {
        throw std::invalid_argument(fmt::format("instance {} has {} strategies for {} parties",
                                                inst, spec.roles.size(), spec.params->parties()));
      }
      const Layout& layout = spec.params->layout();
      if (layout.size() != first.size()) throw std::invalid_argument("instances differ in M");
      for (std::size_t i = 0; i < layout.size(); ++i) {
        if (layout.ball(i).center != first.ball(i).center ||
            layout.ball(i).radius != first.ball(i).radius) {
          throw std::invalid_argument("parallel instances must share the balls B_i");
        }
      }
      bool any_honest = false;
      for (std::size_t k = 0; k < spec.roles.size(); ++k) {
        const auto& s = spec.roles[k];
        if (!s) throw std::invalid_argument("missing strategy");
        if (s->honest()) {
          any_honest = true;
          if (!s->source()) throw std::invalid_argument("honest strategy without a source");
          check_source(*spec.params, k, *s->source());
        } else if (!coalition_) {
          coalition_ = s;
        } else if (coalition_ != s) {
          throw std::invalid_argument("dishonest roles must share one coalition strategy");
        }
      }
      if (!any_honest) throw std::invalid_argument(fmt::format("instance {} has no honest party", inst));
    }
  }

  RunState& state() { return state_; }
  std::size_t instance_count() const { return instances_.size(); }
  const ProtocolParams& params(std::size_t inst) const { return *instances_[inst].params; }
  const Strategy& strategy(std::size_t inst, std::size_t party) const {
    return *instances_[inst].roles.at(party);
  }
  bool honest(std::size_t inst, std::size_t party) const {
    return instances_[inst].roles.at(party)->honest();
  }
  Randomness& randomness() { return randomness_; }
  std::size_t shared() const { return shared_; }
  const StrategyPtr& coalition() const { return coalition_; }

  bool controls(const LabId& reader, std::size_t inst, std::size_t party) const {
    if (honest(reader.instance, reader.owner)) return inst == reader.instance && party == reader.owner;
    return !honest(inst, party);
  }

  SessionResult run();

 private:
  std::span<const InstanceSpec> instances_;
  Randomness& randomness_;
  RunState state_;
  StrategyPtr coalition_;
  std::size_t shared_ = 0;
};

LabView::LabView(Session& session, LabId lab, SpacetimeEvent at)
    : session_(session), lab_(lab), at_(at) {}

const ProtocolParams& LabView::params() const { return session_.params(lab_.instance); }
const ProtocolParams& LabView::params(std::size_t instance) const {
  return session_.params(instance);
}
std::size_t LabView::instances() const { return session_.instance_count(); }
bool LabView::controls(std::size_t instance, std::size_t party) const {
  return session_.controls(lab_, instance, party);
}
bool LabView::honest(std::size_t instance, std::size_t party) const {
  return session_.honest(instance, party);
}
std::size_t LabView::shared_randomness() const {
  return session_.honest(lab_.instance, lab_.owner) ? 0 : session_.shared();
}

std::vector<EventHandle> LabView::own_events() const {
  std::vector<EventHandle> out;
  for (const auto& e : session_.state().events()) {
    if (!controls(e.lab.instance, e.lab.owner)) continue;
    out.push_back(EventHandle{e.id, e.kind, e.lab, e.at, e.channel, e.peer});
  }
  return out;
}

std::vector<EventHandle> LabView::visible_events() const {
  auto all = own_events();
  std::erase_if(all, [&](const EventHandle& h) { return !in_causal_past(h.at, at_); });
  return all;
}

const Payload& LabView::read(EventId id) {
  auto& state = session_.state();
  if (id >= state.size()) throw std::invalid_argument(fmt::format("event {} does not exist", id));
  const EventRecord& target = state.event(id);
  if (!controls(target.lab.instance, target.lab.owner)) {
    throw AccessViolation(fmt::format("{} cannot read secure laboratory {}", lab_.str(),
                                      target.lab.str()));
  }
  state.check_admissible(id, at_, state.next_id());
  if (std::find(reads_.begin(), reads_.end(), id) == reads_.end()) reads_.push_back(id);
  return target.payload;
}

std::int64_t LabView::draw(const SourceModel& source) {
  if (!session_.honest(lab_.instance, lab_.owner) || lab_.site != lab_.owner) {
    throw std::logic_error("honest draws happen at the party's home laboratory");
  }
  const std::int64_t value = session_.randomness().draw(lab_, source);
  if (value < 0 || value >= static_cast<std::int64_t>(source.modulus())) {
    throw std::out_of_range("draw outside Z_n");
  }
  EventRecord e;
  e.kind = EventKind::Draw;
  e.lab = lab_;
  e.at = at_;
  e.payload = {value};
  e.note = "R_k";
  reads_.push_back(session_.state().schedule(std::move(e)).id);
  return value;
}

void LabView::send(const Dispatch& d) {
  if (d.from != lab_) throw std::invalid_argument("dispatch must leave from the deciding lab");
  if (std::abs(d.emitted_at.t - at_.t) > kGeomTolerance ||
      distance(d.emitted_at.pos, at_.pos) > kGeomTolerance) {
    throw std::invalid_argument("dispatch must be emitted at the decision point");
  }
  if (distance(d.received_at.pos, params(d.to.instance).lab_position(d.to)) > kGeomTolerance) {
    throw std::invalid_argument("dispatch must be received at the destination lab");
  }
  auto& state = session_.state();
  EventRecord emit;
  emit.kind = EventKind::Emit;
  emit.lab = d.from;
  emit.at = d.emitted_at;
  emit.payload = d.payload;
  emit.causes = reads_;
  emit.channel = d.channel;
  emit.peer = d.to;
  const EventId emit_id = state.schedule(std::move(emit)).id;

  EventRecord recv;
  recv.kind = EventKind::Receive;
  recv.lab = d.to;
  recv.at = d.received_at;
  recv.payload = d.payload;
  recv.causes = {emit_id};
  recv.channel = d.channel;
  recv.peer = d.from;
  state.schedule(std::move(recv));
}

void LabView::abort(AbortReason reason, std::size_t culprit) {
  EventRecord e;
  e.kind = EventKind::Abort;
  e.lab = lab_;
  e.at = at_;
  e.payload = {static_cast<std::int64_t>(reason), static_cast<std::int64_t>(culprit)};
  e.causes = reads_;
  e.note = to_string(reason);
  session_.state().schedule(std::move(e));
}

void LabView::conclude(std::int64_t x, std::size_t outcome, std::span<const std::int64_t> values) {
  EventRecord e;
  e.kind = EventKind::Verify;
  e.lab = lab_;
  e.at = at_;
  e.payload = {x, static_cast<std::int64_t>(outcome)};
  e.payload.insert(e.payload.end(), values.begin(), values.end());
  e.causes = reads_;
  e.note = "outcome";
  session_.state().schedule(std::move(e));
}

SpacetimeEvent Strategy::delivery_point(const ProtocolParams& params, RoleRef role,
                                        std::size_t site, std::size_t) const {
  return SpacetimeEvent{0.0, params.lab_position(LabId{role.instance, role.party, site})};
}

namespace {

enum class TaskKind { Predistribute, Acknowledge, Deliver, Verify, Respond, Finalize };

struct Task {
  SpacetimeEvent at;
  LabId lab;
  TaskKind kind;
  std::size_t arg = 0;
  // Honest stage I/II work depends on nothing the coalition does, so it runs
  // first; a dishonest read of a later honest event then fails the light-cone
  // check instead of finding nothing.
  int phase = 1;

  auto key() const { return std::tuple(phase, at.t, lab, static_cast<int>(kind), arg); }
};

}  // namespace

SessionResult Session::run() {
  if (coalition_) {
    const auto dist = coalition_->shared_distribution();
    shared_ = randomness_.shared(dist);
    // Record the pre-shared value at the first dishonest home lab.
    for (std::size_t inst = 0; inst < instances_.size(); ++inst) {
      const auto& roles = instances_[inst].roles;
      auto it = std::find_if(roles.begin(), roles.end(), [](const StrategyPtr& s) { return !s->honest(); });
      if (it == roles.end()) continue;
      const auto k = static_cast<std::size_t>(std::distance(roles.begin(), it));
      const LabId home{inst, k, k};
      EventRecord e;
      e.kind = EventKind::Draw;
      e.lab = home;
      e.at = SpacetimeEvent{params(inst).predistribution_time(), params(inst).lab_position(home)};
      e.payload = {static_cast<std::int64_t>(shared_)};
      e.note = "shared";
      state_.schedule(std::move(e));
      break;
    }
  }

  std::vector<Task> tasks;
  for (std::size_t inst = 0; inst < instances_.size(); ++inst) {
    const ProtocolParams& p = params(inst);
    const std::size_t m = p.parties();
    for (std::size_t k = 0; k < m; ++k) {
      const Strategy& s = strategy(inst, k);
      const LabId home{inst, k, k};
      const Vec3 home_pos = p.lab_position(home);
      tasks.push_back({{p.predistribution_time(), home_pos}, home, TaskKind::Predistribute});
      for (std::size_t i = 0; i < m; ++i) {
        if (i == k) continue;
        const LabId site{inst, k, i};
        if (s.honest() && p.timing().confirm_receipt) {
          const double arrival = p.predistribution_time() +
                                 p.layout().center_distance(k, i) / p.timing().slow_speed;
          tasks.push_back({{arrival, p.lab_position(site)}, site, TaskKind::Acknowledge});
        }
        tasks.push_back({s.delivery_point(p, RoleRef{inst, k}, i, honest(inst, k) ? 0 : shared_),
                         site, TaskKind::Deliver, i});
      }
      tasks.push_back({{p.verification_time(), home_pos}, home, TaskKind::Verify});
      if (!s.honest()) {
        for (std::size_t r = 0; r < m; ++r) {
          if (r == k) continue;
          const double arrival = p.verification_time() + p.layout().center_distance(r, k);
          tasks.push_back({{arrival, home_pos}, home, TaskKind::Respond, r});
        }
      }
      tasks.push_back({{p.final_time(), home_pos}, home, TaskKind::Finalize});
    }
  }
  for (Task& task : tasks) {
    const bool early = task.kind == TaskKind::Predistribute || task.kind == TaskKind::Acknowledge ||
                       task.kind == TaskKind::Deliver;
    if (early && honest(task.lab.instance, task.lab.owner)) task.phase = 0;
  }
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const Task& a, const Task& b) { return a.key() < b.key(); });

  for (const Task& task : tasks) {
    const Strategy& s = strategy(task.lab.instance, task.lab.owner);
    LabView view(*this, task.lab, task.at);
    switch (task.kind) {
      case TaskKind::Predistribute: s.predistribute(view); break;
      case TaskKind::Acknowledge: s.acknowledge(view); break;
      case TaskKind::Deliver: s.deliver(view, task.arg); break;
      case TaskKind::Verify: s.verify(view); break;
      case TaskKind::Respond: s.respond(view, task.arg); break;
      case TaskKind::Finalize: s.finalize(view); break;
    }
  }

  SessionResult result;
  for (std::size_t inst = 0; inst < instances_.size(); ++inst) {
    Transcript t;
    t.params = instances_[inst].params;
    t.instance = inst;
    std::optional<std::pair<std::int64_t, std::size_t>> agreed;
    for (const auto& e : state_.events()) {
      if (e.lab.instance != inst) continue;
      switch (e.kind) {
        case EventKind::Emit: {
          const EventRecord& recv = state_.event(e.id + 1);
          t.messages.push_back(Message{e.lab, *e.peer, e.channel, e.payload, e.at, recv.at, e.id,
                                       recv.id});
          break;
        }
        case EventKind::Abort:
          t.aborts.push_back(LabAbort{e.lab, static_cast<AbortReason>(e.payload.at(0)),
                                      static_cast<std::size_t>(e.payload.at(1))});
          break;
        case EventKind::Verify: {
          const std::pair<std::int64_t, std::size_t> concluded{
              e.payload.at(0), static_cast<std::size_t>(e.payload.at(1))};
          if (agreed && *agreed != concluded) {
            throw std::logic_error("honest parties concluded different outcomes without abort");
          }
          agreed = concluded;
          t.accepted[e.lab.owner] = Payload(e.payload.begin() + 2, e.payload.end());
          break;
        }
        default: break;
      }
    }
    if (t.aborts.empty()) {
      if (!agreed) throw std::logic_error("no honest party concluded the protocol");
      t.x = agreed->first;
      t.outcome = agreed->second;
    }
    result.transcripts.push_back(std::move(t));
  }
  result.state = std::move(state_);
  return result;
}

SessionResult run_session(std::span<const InstanceSpec> instances, Randomness& randomness) {
  Session session(instances, randomness);
  return session.run();
}

Transcript run_protocol(std::shared_ptr<const ProtocolParams> params,
                        std::span<const StrategyPtr> strategies, Randomness& randomness) {
  const InstanceSpec spec{std::move(params), {strategies.begin(), strategies.end()}};
  auto result = run_session(std::span(&spec, 1), randomness);
  return std::move(result.transcripts.front());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string coords(const SpacetimeEvent& e) {
  return fmt::format("({:.17g};{:.17g},{:.17g},{:.17g})", e.t, e.pos[0], e.pos[1], e.pos[2]);
}

}  // namespace

std::string serialize_transcript(const Transcript& t) {
  const ProtocolParams& p = *t.params;
  std::string out = fmt::format("# dieroll transcript v1 instance={} M={} n={} N={}\n", t.instance,
                                p.parties(), p.modulus(), p.outcomes());
  for (const auto& m : t.messages) {
    out += fmt::format("msg channel={} from={} to={} payload=[{}] emit={} recv={}\n",
                       to_string(m.channel), m.from.str(), m.to.str(), fmt::join(m.payload, ","),
                       coords(m.emitted_at), coords(m.received_at));
  }
  for (const auto& a : t.aborts) {
    out += fmt::format("abort lab={} reason={} culprit={}\n", a.lab.str(), to_string(a.reason),
                       a.culprit + 1);
  }
  if (t.outcome) {
    out += fmt::format("outcome x={} o={}\n", *t.x, *t.outcome);
  } else {
    out += "outcome aborted\n";
  }
  return out;
}

}  // namespace dieroll
