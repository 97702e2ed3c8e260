#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "homophily/group_pair.hpp"

namespace homophily {

struct Event {
  double t;
  int mark;  // flat PairIndex of the group pair

  bool operator==(const Event&) const = default;
};

/// Half-open observation window [start, end).
struct Window {
  double start = 0.0;
  double end = 0.0;

  double length() const noexcept { return end - start; }
  bool contains(double t) const noexcept { return t >= start && t < end; }
  bool operator==(const Window&) const = default;
};

/// Time-ordered marked events on [0, horizon).
///
/// Timestamps are nondecreasing globally and strictly increasing within each
/// mark stream. Events sharing a timestamp keep insertion order.
class EventLog {
 public:
  EventLog(int groups, double horizon);

  /// Appends an event; throws std::invalid_argument if it would break ordering,
  /// falls outside [0, horizon), or carries an unknown mark.
  void append(double t, int mark);
  void append(double t, const GroupPair& pair) { append(t, index().flat(pair)); }

  /// Raises the horizon (used when a simulation phase continues a log).
  void extend_horizon(double horizon);

  int groups() const noexcept { return groups_; }
  int pairs() const noexcept { return pair_count(groups_); }
  double horizon() const noexcept { return horizon_; }
  PairIndex index() const { return PairIndex(groups_); }

  std::span<const Event> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  /// Events of `mark` with start <= t < end.
  std::size_t count(int mark, const Window& window) const;
  /// Per-mark counts on the window.
  std::vector<std::size_t> counts(const Window& window) const;
  /// Timestamps of `mark` inside the window, in order.
  std::vector<double> times(int mark, const Window& window) const;

  bool operator==(const EventLog&) const = default;

 private:
  int groups_;
  double horizon_;
  std::vector<Event> events_;
  std::vector<double> last_time_per_mark_;
};

}  // namespace homophily
