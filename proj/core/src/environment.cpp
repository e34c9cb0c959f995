#include "bds/environment.hpp"

#include <algorithm>
#include <stdexcept>

namespace bds {

EnvironmentPath::EnvironmentPath(std::vector<double> switch_times,
                                 std::vector<int> regime_of_segment, std::vector<Regime> table)
    : switch_times_(std::move(switch_times)),
      regime_of_segment_(std::move(regime_of_segment)),
      table_(std::move(table)) {
  if (switch_times_.empty() || switch_times_.front() != 0.0)
    throw std::invalid_argument("EnvironmentPath: first switch time must be 0");
  if (switch_times_.size() != regime_of_segment_.size())
    throw std::invalid_argument("EnvironmentPath: one regime per segment required");
  if (!std::is_sorted(switch_times_.begin(), switch_times_.end()))
    throw std::invalid_argument("EnvironmentPath: switch times must increase");
  for (int r : regime_of_segment_)
    if (r < 0 || r >= static_cast<int>(table_.size()))
      throw std::invalid_argument("EnvironmentPath: regime index out of range");
}

EnvironmentPath EnvironmentPath::constant(Regime regime) {
  std::vector<Regime> table;
  table.push_back(std::move(regime));
  return EnvironmentPath({0.0}, {0}, std::move(table));
}

EnvironmentPath EnvironmentPath::markov_switching(
    const std::vector<std::vector<double>>& generator, std::vector<Regime> per_state,
    int initial_state, double horizon, const RandomSource& source, std::uint64_t replicate) {
  const std::size_t q = generator.size();
  if (q == 0 || per_state.size() != q)
    throw std::invalid_argument("markov_switching: generator/regime size mismatch");
  if (initial_state < 0 || static_cast<std::size_t>(initial_state) >= q)
    throw std::invalid_argument("markov_switching: bad initial state");

  RngStream rng = source.stream("env", replicate);
  std::vector<double> times{0.0};
  std::vector<int> states{initial_state};
  int state = initial_state;
  double t = 0.0;
  while (true) {
    const auto& row = generator[static_cast<std::size_t>(state)];
    if (row.size() != q) throw std::invalid_argument("markov_switching: ragged generator");
    double out = 0.0;
    for (std::size_t j = 0; j < q; ++j)
      if (static_cast<int>(j) != state) out += row[j];
    if (!(out > 0.0)) break;  // absorbing regime
    t += rng.exponential(out);
    if (t >= horizon) break;
    double u = rng.uniform01() * out;
    double acc = 0.0;
    int next = state;
    for (std::size_t j = 0; j < q; ++j) {
      if (static_cast<int>(j) == state) continue;
      acc += row[j];
      if (u < acc) {
        next = static_cast<int>(j);
        break;
      }
    }
    state = next;
    times.push_back(t);
    states.push_back(state);
  }
  return EnvironmentPath(std::move(times), std::move(states), std::move(per_state));
}

std::size_t EnvironmentPath::segment_at(double t) const {
  auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
  if (it == switch_times_.begin()) return 0;
  return static_cast<std::size_t>(it - switch_times_.begin()) - 1;
}

std::size_t EnvironmentPath::segment_before(double t) const {
  auto it = std::lower_bound(switch_times_.begin(), switch_times_.end(), t);
  if (it == switch_times_.begin()) return 0;
  return static_cast<std::size_t>(it - switch_times_.begin()) - 1;
}

}  // namespace bds
