#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bds {

// A population over p subgroups is a vector of nonnegative counts.
using PopulationState = std::vector<std::int64_t>;

// Per-event-type occurrence counts, flat-indexed by EventSpace.
using CountingVector = std::vector<std::int64_t>;

enum class EventKind : std::uint8_t { Swap, Birth, Death };

// One event type: a swap moves an individual from `source` to `dest`, a birth
// adds one to `dest`, a death removes one from `source`. Subgroup indices are
// 0-based; the unused slot of a demographic event is -1 (the "not born yet or
// already dead" compartment, whose basis vector is zero).
struct EventType {
  EventKind kind{EventKind::Swap};
  int source{-1};
  int dest{-1};

  static EventType swap(int i, int j) { return {EventKind::Swap, i, j}; }
  static EventType birth(int j) { return {EventKind::Birth, -1, j}; }
  static EventType death(int i) { return {EventKind::Death, i, -1}; }

  bool is_demographic() const { return kind != EventKind::Swap; }
  bool operator==(const EventType&) const = default;
};

std::string to_string(const EventType& ev);

// Dense indexing of the p(p+1) event types of a p-subgroup model, in the
// fixed order: swaps row-major, then births, then deaths. The index is the
// layout contract shared by counting vectors, skeletons and rate vectors.
class EventSpace {
 public:
  explicit EventSpace(int subgroups);

  int subgroups() const { return p_; }
  int size() const { return p_ * (p_ + 1); }
  int swap_count() const { return p_ * (p_ - 1); }

  int index(const EventType& ev) const;
  const EventType& event(int index) const { return events_[static_cast<std::size_t>(index)]; }
  std::span<const EventType> events() const { return events_; }

  bool is_swap_index(int index) const { return index < swap_count(); }
  bool is_birth_index(int index) const { return index >= swap_count() && index < swap_count() + p_; }
  bool is_death_index(int index) const { return index >= swap_count() + p_; }

 private:
  int p_;
  std::vector<EventType> events_;
};

// Signed per-subgroup displacement of one event: e_dest - e_source.
std::vector<int> effect_vector(const EventType& ev, int subgroups);

// Applies a counting vector to an initial population: z0 + sum_gamma
// phi(gamma) * nu[gamma]. The result may have negative components for an
// arbitrary nu; callers that require a valid population must check.
std::vector<std::int64_t> apply_counts(const PopulationState& z0, const EventSpace& space,
                                       const CountingVector& nu);

// In-place single-event update; asserts the consumed subgroup is nonempty.
void apply_event(PopulationState& z, const EventType& ev);

inline std::int64_t aggregate(std::span<const std::int64_t> x) {
  std::int64_t total = 0;
  for (auto v : x) total += v;
  return total;
}

}  // namespace bds
