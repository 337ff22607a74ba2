#pragma once

// Logical-time causal event store. Every event names the events it depends
// on; an event is committed only if each cause lies in its closed past light
// cone. Frame coordinates are data, not wall clock.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dieroll/spacetime.hpp"

namespace dieroll {

/// Laboratory L_ki of party `owner` (k) inside ball `site` (i), within one
/// protocol instance. Indices are zero-based; printed one-based.
struct LabId {
  std::size_t instance = 0;
  std::size_t owner = 0;
  std::size_t site = 0;

  auto operator<=>(const LabId&) const = default;
  std::string str() const;
};

using EventId = std::size_t;
using Payload = std::vector<std::int64_t>;

enum class EventKind { Draw, Emit, Receive, Verify, Abort };

enum class ChannelClass { None, SlowIntraParty, FastInterParty, Verification, Confirmation };

const char* to_string(EventKind kind);
const char* to_string(ChannelClass channel);

struct EventRecord {
  EventId id = 0;
  EventKind kind = EventKind::Draw;
  LabId lab;
  SpacetimeEvent at;
  Payload payload;
  std::vector<EventId> causes;
  ChannelClass channel = ChannelClass::None;
  std::optional<LabId> peer;  // destination of an emit, source of a receive
  std::string note;           // abort reason, draw label
};

class CausalityViolation : public std::runtime_error {
 public:
  CausalityViolation(EventId offending, EventId forbidden, double deficit);

  EventId offending() const { return offending_; }
  EventId forbidden() const { return forbidden_; }
  /// |dx| - dt between the forbidden cause and the offending event; > 0.
  double deficit() const { return deficit_; }

 private:
  EventId offending_;
  EventId forbidden_;
  double deficit_;
};

class RunState {
 public:
  /// Assigns the next id and commits the event if every cause is committed
  /// and causally admissible. Throws CausalityViolation on the first
  /// offending cause and std::invalid_argument on unknown cause ids.
  const EventRecord& schedule(EventRecord event);

  /// Throws CausalityViolation unless `cause` is in the closed past light
  /// cone of `at`. `offending` names the event that would depend on it.
  void check_admissible(EventId cause, const SpacetimeEvent& at, EventId offending) const;

  EventId next_id() const { return events_.size(); }
  const EventRecord& event(EventId id) const { return events_.at(id); }
  std::span<const EventRecord> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Events sorted by frame time with ties broken by (lab, id), restricted to
  /// a linear extension of the causes DAG.
  std::vector<EventId> total_order() const;

 private:
  std::vector<EventRecord> events_;
};

/// One line per event in total order, with cause edges. Stable field order.
std::string serialize_event_log(const RunState& state);

}  // namespace dieroll
