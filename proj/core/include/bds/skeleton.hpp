#pragma once

#include <cstdint>
#include <vector>

#include "bds/errors.hpp"
#include "bds/events.hpp"

namespace bds {

// One candidate jump of the dominating process: the component that fired,
// the dominating rate the component had at that instant, and the mark drawn
// uniformly on ]0, rate]. Marks are stored as absolute levels so the record
// can be re-thinned against any smaller functional without rescaling.
struct SkeletonRecord {
  double time{0.0};
  double mark{0.0};
  double rate{0.0};
  EventType event;
};

// Time-ordered candidate jumps of a dominating process over [0, horizon].
// This is the shared randomness all couplings replay.
struct JumpSkeleton {
  int subgroups{0};
  double horizon{0.0};
  std::int64_t initial_aggregate{0};
  std::vector<SkeletonRecord> records;
};

// Raised when the record cap is hit; carries what was generated so far.
struct ExplosionError : SimulationError {
  ExplosionError(const std::string& what, JumpSkeleton partial_skeleton)
      : SimulationError(what), partial(std::move(partial_skeleton)) {}
  JumpSkeleton partial;
};

}  // namespace bds
