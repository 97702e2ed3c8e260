#pragma once

#include <cstdint>
#include <optional>

#include "homophily/event_log.hpp"
#include "homophily/hawkes_params.hpp"
#include "homophily/intensity.hpp"
#include "homophily/regime_schedule.hpp"

namespace homophily {

/// Exact simulation of the group-pair Hawkes process on [0, horizon) by Ogata
/// thinning.
///
/// The dominating rate is the total intensity at the current proposal origin,
/// which bounds the intensity until the next event because exponential kernels
/// only decay. Proposals that cross a breakpoint are discarded, the clock moves
/// to the breakpoint and the bound is recomputed under the new matrix.
/// Deterministic for a given seed (xoshiro256**).
///
/// Throws std::invalid_argument for horizon <= 0 or a schedule that does not fit.
EventLog simulate(const HawkesParams& params, const RegimeSchedule* schedule, double horizon,
                  std::uint64_t seed, RegimeMode mode = RegimeMode::kReweightPast);

inline EventLog simulate(const HawkesParams& params, double horizon, std::uint64_t seed) {
  return simulate(params, nullptr, horizon, seed);
}

}  // namespace homophily
