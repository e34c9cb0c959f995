#include "bds/path.hpp"

namespace bds {

PopulationState BdsPath::state_before(double t) const {
  PopulationState z = initial_state;
  for (const auto& ev : events) {
    if (ev.time >= t) break;
    apply_event(z, ev.event);
  }
  return z;
}

PopulationState BdsPath::state_at(double t) const {
  PopulationState z = initial_state;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    apply_event(z, ev.event);
  }
  return z;
}

CountingVector BdsPath::counts_at(double t, const EventSpace& space) const {
  CountingVector nu(static_cast<std::size_t>(space.size()), 0);
  for (const auto& ev : events) {
    if (ev.time > t) break;
    nu[static_cast<std::size_t>(space.index(ev.event))] += 1;
  }
  return nu;
}

std::int64_t BdsPath::birth_count_at(double t) const {
  std::int64_t count = 0;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Birth) ++count;
  }
  return count;
}

std::int64_t BdsPath::death_count_at(double t) const {
  std::int64_t count = 0;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Death) ++count;
  }
  return count;
}

std::int64_t BdsPath::swap_count_at(double t) const {
  std::int64_t count = 0;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Swap) ++count;
  }
  return count;
}

}  // namespace bds
