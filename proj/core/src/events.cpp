#include "bds/events.hpp"

#include <cassert>
#include <stdexcept>

namespace bds {

std::string to_string(const EventType& ev) {
  switch (ev.kind) {
    case EventKind::Swap:
      return "swap(" + std::to_string(ev.source + 1) + "->" + std::to_string(ev.dest + 1) + ")";
    case EventKind::Birth:
      return "birth(" + std::to_string(ev.dest + 1) + ")";
    case EventKind::Death:
      return "death(" + std::to_string(ev.source + 1) + ")";
  }
  return "?";
}

EventSpace::EventSpace(int subgroups) : p_(subgroups) {
  if (p_ < 1) throw std::invalid_argument("EventSpace: need at least one subgroup");
  events_.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j)
      if (i != j) events_.push_back(EventType::swap(i, j));
  for (int j = 0; j < p_; ++j) events_.push_back(EventType::birth(j));
  for (int i = 0; i < p_; ++i) events_.push_back(EventType::death(i));
}

int EventSpace::index(const EventType& ev) const {
  switch (ev.kind) {
    case EventKind::Swap: {
      if (ev.source < 0 || ev.source >= p_ || ev.dest < 0 || ev.dest >= p_ || ev.source == ev.dest)
        throw std::out_of_range("EventSpace: bad swap indices");
      return ev.source * (p_ - 1) + (ev.dest < ev.source ? ev.dest : ev.dest - 1);
    }
    case EventKind::Birth:
      if (ev.dest < 0 || ev.dest >= p_) throw std::out_of_range("EventSpace: bad birth index");
      return swap_count() + ev.dest;
    case EventKind::Death:
      if (ev.source < 0 || ev.source >= p_) throw std::out_of_range("EventSpace: bad death index");
      return swap_count() + p_ + ev.source;
  }
  throw std::out_of_range("EventSpace: bad event kind");
}

std::vector<int> effect_vector(const EventType& ev, int subgroups) {
  if (subgroups < 1) throw std::out_of_range("effect_vector: bad dimension");
  std::vector<int> phi(static_cast<std::size_t>(subgroups), 0);
  if (ev.kind != EventKind::Birth) {
    if (ev.source < 0 || ev.source >= subgroups) throw std::out_of_range("effect_vector: bad source");
    phi[static_cast<std::size_t>(ev.source)] -= 1;
  }
  if (ev.kind != EventKind::Death) {
    if (ev.dest < 0 || ev.dest >= subgroups) throw std::out_of_range("effect_vector: bad dest");
    phi[static_cast<std::size_t>(ev.dest)] += 1;
  }
  return phi;
}

std::vector<std::int64_t> apply_counts(const PopulationState& z0, const EventSpace& space,
                                       const CountingVector& nu) {
  if (static_cast<int>(z0.size()) != space.subgroups() ||
      static_cast<int>(nu.size()) != space.size())
    throw std::invalid_argument("apply_counts: dimension mismatch");
  std::vector<std::int64_t> z(z0.begin(), z0.end());
  for (int k = 0; k < space.size(); ++k) {
    const std::int64_t count = nu[static_cast<std::size_t>(k)];
    if (count == 0) continue;
    const EventType& ev = space.event(k);
    if (ev.kind != EventKind::Birth) z[static_cast<std::size_t>(ev.source)] -= count;
    if (ev.kind != EventKind::Death) z[static_cast<std::size_t>(ev.dest)] += count;
  }
  return z;
}

void apply_event(PopulationState& z, const EventType& ev) {
  if (ev.kind != EventKind::Birth) {
    auto& src = z[static_cast<std::size_t>(ev.source)];
    assert(src > 0 && "event consumes from an empty subgroup");
    src -= 1;
  }
  if (ev.kind != EventKind::Death) z[static_cast<std::size_t>(ev.dest)] += 1;
}

}  // namespace bds
