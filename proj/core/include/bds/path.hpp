#pragma once

#include <cstdint>
#include <vector>

#include "bds/events.hpp"

namespace bds {

struct PathEvent {
  double time{0.0};
  EventType event;

  bool operator==(const PathEvent&) const = default;
};

// An accepted event sequence together with its initial population. State and
// counting-vector trajectories are derived on demand.
struct BdsPath {
  PopulationState initial_state;
  std::vector<PathEvent> events;
  double horizon{0.0};
  std::uint64_t master_seed{0};
  std::uint64_t replicate{0};

  int subgroups() const { return static_cast<int>(initial_state.size()); }

  // State just before t (all events with time < t applied).
  PopulationState state_before(double t) const;
  // State at t (events with time <= t applied); pass horizon for the final state.
  PopulationState state_at(double t) const;

  CountingVector counts_at(double t, const EventSpace& space) const;

  // Aggregate birth/death/swap counts up to and including t.
  std::int64_t birth_count_at(double t) const;
  std::int64_t death_count_at(double t) const;
  std::int64_t swap_count_at(double t) const;
};

}  // namespace bds
