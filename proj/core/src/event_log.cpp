#include "homophily/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace homophily {

EventLog::EventLog(int groups, double horizon)
    : groups_(groups),
      horizon_(horizon),
      last_time_per_mark_(static_cast<std::size_t>(pair_count(groups)),
                          -std::numeric_limits<double>::infinity()) {
  if (groups < 1) throw std::invalid_argument("group count must be at least 1");
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw std::invalid_argument("horizon must be finite and positive");
  }
}

void EventLog::append(double t, int mark) {
  if (mark < 0 || mark >= pairs()) {
    throw std::invalid_argument("event mark " + std::to_string(mark) + " out of range");
  }
  if (!std::isfinite(t) || t < 0.0 || t >= horizon_) {
    throw std::invalid_argument("event time " + std::to_string(t) +
                                " outside [0, horizon)");
  }
  if (!events_.empty() && t < events_.back().t) {
    throw std::invalid_argument("event times must be nondecreasing");
  }
  auto& last = last_time_per_mark_[static_cast<std::size_t>(mark)];
  if (t <= last) {
    throw std::invalid_argument("event times must be strictly increasing per mark");
  }
  last = t;
  events_.push_back({t, mark});
}

void EventLog::extend_horizon(double horizon) {
  if (!(horizon >= horizon_) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon can only be extended");
  }
  horizon_ = horizon;
}

std::size_t EventLog::count(int mark, const Window& window) const {
  return static_cast<std::size_t>(
      std::count_if(events_.begin(), events_.end(), [&](const Event& e) {
        return e.mark == mark && window.contains(e.t);
      }));
}

std::vector<std::size_t> EventLog::counts(const Window& window) const {
  std::vector<std::size_t> out(static_cast<std::size_t>(pairs()), 0);
  for (const auto& e : events_) {
    if (window.contains(e.t)) ++out[static_cast<std::size_t>(e.mark)];
  }
  return out;
}

std::vector<double> EventLog::times(int mark, const Window& window) const {
  std::vector<double> out;
  for (const auto& e : events_) {
    if (e.mark == mark && window.contains(e.t)) out.push_back(e.t);
  }
  return out;
}

}  // namespace homophily
