#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bds/events.hpp"

namespace bds {

// All populations of total size n over p subgroups, in lexicographic order.
// The ordering is the shared indexing contract between swap generators,
// invariant kernels and occupation estimators.
class LevelSet {
 public:
  LevelSet(std::int64_t n, int subgroups, std::size_t cap);

  std::int64_t total_size() const { return n_; }
  int subgroups() const { return p_; }
  std::size_t size() const { return states_.size(); }
  const PopulationState& state(std::size_t index) const { return states_[index]; }
  const std::vector<PopulationState>& states() const { return states_; }

  // Index of a state in the lexicographic ordering; throws if z is not in U_n.
  std::size_t index_of(const PopulationState& z) const;

 private:
  std::int64_t n_;
  int p_;
  std::vector<PopulationState> states_;
};

// Number of compositions of n into p parts, C(n+p-1, p-1); saturates at the
// cap sentinel instead of overflowing.
std::uint64_t level_set_cardinality(std::int64_t n, int subgroups);

std::size_t default_level_set_cap();
void set_default_level_set_cap(std::size_t cap);

// Memoized access; instances are immutable and shared across threads.
std::shared_ptr<const LevelSet> enumerate_level_set(std::int64_t n, int subgroups,
                                                    std::size_t cap = default_level_set_cap());

}  // namespace bds
