#include "bds/level_set.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>

#include "bds/errors.hpp"

namespace bds {

namespace {

std::atomic<std::size_t> g_cap{2'000'000};

}  // namespace

std::size_t default_level_set_cap() { return g_cap.load(); }
void set_default_level_set_cap(std::size_t cap) { g_cap.store(cap); }

std::uint64_t level_set_cardinality(std::int64_t n, int subgroups) {
  // C(n+p-1, p-1) with saturation.
  const std::uint64_t sentinel = UINT64_MAX;
  if (n < 0 || subgroups < 1) throw std::invalid_argument("level_set_cardinality: bad arguments");
  std::uint64_t result = 1;
  for (int k = 1; k <= subgroups - 1; ++k) {
    const std::uint64_t num = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k);
    if (result > sentinel / num) return sentinel;
    result = result * num / static_cast<std::uint64_t>(k);
  }
  return result;
}

LevelSet::LevelSet(std::int64_t n, int subgroups, std::size_t cap) : n_(n), p_(subgroups) {
  if (n < 0 || subgroups < 1) throw std::invalid_argument("LevelSet: bad arguments");
  const std::uint64_t card = level_set_cardinality(n, subgroups);
  if (card > cap)
    throw EnumerationCapError("level set of size n=" + std::to_string(n) + ", p=" +
                              std::to_string(subgroups) + " has " + std::to_string(card) +
                              " states, above cap " + std::to_string(cap));
  states_.reserve(static_cast<std::size_t>(card));
  PopulationState z(static_cast<std::size_t>(p_), 0);
  z.back() = n;
  // Lexicographic successor on compositions of n: bump the slot left of the
  // last nonzero entry, park the remaining mass in the final slot.
  while (true) {
    states_.push_back(z);
    int last = p_ - 1;
    while (last >= 0 && z[static_cast<std::size_t>(last)] == 0) --last;
    if (last <= 0) break;
    const int k = last - 1;
    z[static_cast<std::size_t>(k)] += 1;
    std::int64_t tail = -1;
    for (int m = k + 1; m < p_; ++m) {
      tail += z[static_cast<std::size_t>(m)];
      z[static_cast<std::size_t>(m)] = 0;
    }
    z[static_cast<std::size_t>(p_ - 1)] = tail;
  }
}

std::size_t LevelSet::index_of(const PopulationState& z) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), z);
  if (it == states_.end() || *it != z)
    throw std::out_of_range("LevelSet::index_of: state not in level set");
  return static_cast<std::size_t>(it - states_.begin());
}

std::shared_ptr<const LevelSet> enumerate_level_set(std::int64_t n, int subgroups,
                                                    std::size_t cap) {
  static std::mutex mutex;
  static std::map<std::pair<std::int64_t, int>, std::shared_ptr<const LevelSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, subgroups);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto set = std::make_shared<const LevelSet>(n, subgroups, cap);
  cache.emplace(key, set);
  return set;
}

}  // namespace bds
