#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bds/random.hpp"

namespace bds {

// Parameter record of one environment regime. Vector entries are per
// subgroup; swap_coeff is a p x p row-major table whose diagonal is unused.
// `k` scales the declared birth dominator. Models read only the fields they
// understand and ignore the rest; free-form extras ride along for custom
// rate formulas.
struct Regime {
  std::string id;
  double k{1.0};
  std::vector<double> death;
  std::vector<double> birth;
  std::vector<double> immigration;
  std::vector<double> swap_coeff;
  std::map<std::string, double> extra;

  double swap(int i, int j, int p) const {
    return swap_coeff[static_cast<std::size_t>(i * p + j)];
  }
};

// Piecewise-constant, right-continuous environment: regime `segment m` is in
// force on [switch_times[m], switch_times[m+1]). Intensities are predictable,
// so a rate evaluated at time t uses the regime in force just before t.
class EnvironmentPath {
 public:
  EnvironmentPath(std::vector<double> switch_times, std::vector<int> regime_of_segment,
                  std::vector<Regime> table);

  static EnvironmentPath constant(Regime regime);

  // Finite-state Markov regime switcher: `generator` is a row-major q x q
  // rate matrix (diagonal ignored), one regime record per state. The switch
  // sequence consumes its own stream of `source`.
  static EnvironmentPath markov_switching(const std::vector<std::vector<double>>& generator,
                                          std::vector<Regime> per_state, int initial_state,
                                          double horizon, const RandomSource& source,
                                          std::uint64_t replicate = 0);

  std::size_t segment_count() const { return switch_times_.size(); }
  double switch_time(std::size_t m) const { return switch_times_[m]; }
  const std::vector<double>& switch_times() const { return switch_times_; }
  const Regime& regime_of_segment(std::size_t m) const {
    return table_[static_cast<std::size_t>(regime_of_segment_[m])];
  }
  int regime_index_of_segment(std::size_t m) const { return regime_of_segment_[m]; }
  const std::vector<Regime>& regime_table() const { return table_; }

  // Segment containing t under right continuity: largest m with
  // switch_times[m] <= t.
  std::size_t segment_at(double t) const;

  // Segment in force at t-, i.e. largest m with switch_times[m] < t
  // (predictability contract; returns 0 for t <= first switch time).
  std::size_t segment_before(double t) const;

  const Regime& regime_at(double t) const { return regime_of_segment(segment_at(t)); }
  const Regime& regime_before(double t) const { return regime_of_segment(segment_before(t)); }

 private:
  std::vector<double> switch_times_;   // increasing, first entry 0
  std::vector<int> regime_of_segment_; // index into table_, one per segment
  std::vector<Regime> table_;
};

}  // namespace bds
