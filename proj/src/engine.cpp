#include "dieroll/engine.hpp"

#include <queue>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dieroll {

std::string LabId::str() const {
  return fmt::format("L{}:{}.{}", instance, owner + 1, site + 1);
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Draw: return "draw";
    case EventKind::Emit: return "emit";
    case EventKind::Receive: return "receive";
    case EventKind::Verify: return "verify";
    case EventKind::Abort: return "abort";
  }
  return "?";
}

const char* to_string(ChannelClass channel) {
  switch (channel) {
    case ChannelClass::None: return "none";
    case ChannelClass::SlowIntraParty: return "slow";
    case ChannelClass::FastInterParty: return "fast";
    case ChannelClass::Verification: return "verification";
    case ChannelClass::Confirmation: return "confirmation";
  }
  return "?";
}

CausalityViolation::CausalityViolation(EventId offending, EventId forbidden, double deficit)
    : std::runtime_error(fmt::format(
          "causality violation: event {} depends on event {} outside its past light cone "
          "(deficit {:.6g})",
          offending, forbidden, deficit)),
      offending_(offending),
      forbidden_(forbidden),
      deficit_(deficit) {}

void RunState::check_admissible(EventId cause, const SpacetimeEvent& at,
                                EventId offending) const {
  if (cause >= events_.size()) {
    throw std::invalid_argument(fmt::format("cause {} is not committed", cause));
  }
  const double deficit = causal_deficit(events_[cause].at, at);
  if (deficit > kGeomTolerance) throw CausalityViolation(offending, cause, deficit);
}

const EventRecord& RunState::schedule(EventRecord event) {
  event.id = events_.size();
  for (EventId cause : event.causes) check_admissible(cause, event.at, event.id);
  events_.push_back(std::move(event));
  return events_.back();
}

std::vector<EventId> RunState::total_order() const {
  using Key = std::tuple<double, LabId, EventId>;
  auto key = [this](EventId id) { return Key{events_[id].at.t, events_[id].lab, id}; };
  auto later = [&](EventId a, EventId b) { return key(a) > key(b); };

  std::vector<std::size_t> pending(events_.size(), 0);
  std::vector<std::vector<EventId>> dependents(events_.size());
  for (const auto& e : events_) {
    pending[e.id] = e.causes.size();
    for (EventId c : e.causes) dependents[c].push_back(e.id);
  }
  std::priority_queue<EventId, std::vector<EventId>, decltype(later)> ready(later);
  for (const auto& e : events_)
    if (pending[e.id] == 0) ready.push(e.id);

  std::vector<EventId> order;
  order.reserve(events_.size());
  while (!ready.empty()) {
    const EventId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (EventId d : dependents[id])
      if (--pending[d] == 0) ready.push(d);
  }
  return order;
}

namespace {

std::string format_event(const SpacetimeEvent& e) {
  return fmt::format("({:.17g};{:.17g},{:.17g},{:.17g})", e.t, e.pos[0], e.pos[1], e.pos[2]);
}

}  // namespace

std::string serialize_event_log(const RunState& state) {
  std::string out = "# dieroll event log v1\n";
  for (EventId id : state.total_order()) {
    const auto& e = state.event(id);
    out += fmt::format("event id={} kind={} lab={} at={}", e.id, to_string(e.kind), e.lab.str(),
                       format_event(e.at));
    if (e.channel != ChannelClass::None) out += fmt::format(" channel={}", to_string(e.channel));
    if (e.peer) out += fmt::format(" peer={}", e.peer->str());
    out += fmt::format(" payload=[{}]", fmt::join(e.payload, ","));
    if (!e.note.empty()) out += fmt::format(" note={}", e.note);
    out += fmt::format(" causes=[{}]\n", fmt::join(e.causes, ","));
  }
  return out;
}

}  // namespace dieroll
