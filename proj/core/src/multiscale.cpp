#include "bds/multiscale.hpp"

#include <cmath>
#include <stdexcept>

namespace bds {

namespace {

class ScaledSwaps final : public IntensityModel {
 public:
  ScaledSwaps(std::shared_ptr<const IntensityModel> base, double epsilon)
      : base_(std::move(base)), inv_epsilon_(1.0 / epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("swap scaling needs epsilon > 0");
  }

  std::string name() const override { return base_->name(); }
  int subgroups() const override { return base_->subgroups(); }

  double rate(const Regime& regime, double t, const PopulationState& z,
              const EventType& ev) const override {
    const double r = base_->rate(regime, t, z, ev);
    return ev.kind == EventKind::Swap ? r * inv_epsilon_ : r;
  }

  double birth_bound(const Regime& regime, double t, int j, std::int64_t n) const override {
    return base_->birth_bound(regime, t, j, n);
  }

  double sup_by_size(const Regime& regime, double t, const EventType& ev,
                     std::int64_t n) const override {
    const double r = base_->sup_by_size(regime, t, ev, n);
    return ev.kind == EventKind::Swap ? r * inv_epsilon_ : r;
  }

  GrowthClass growth_class() const override { return base_->growth_class(); }

 private:
  std::shared_ptr<const IntensityModel> base_;
  double inv_epsilon_;
};

}  // namespace

std::shared_ptr<const IntensityModel> scale_swap_intensities(
    std::shared_ptr<const IntensityModel> base, double epsilon) {
  return std::make_shared<ScaledSwaps>(std::move(base), epsilon);
}

BdsRun simulate_two_timescale(const TwoTimescaleConfig& config, const EnvironmentPath& env,
                              const PopulationState& z0, const RandomSource& source,
                              std::uint64_t replicate, const EngineOptions& options) {
  if (!config.model) throw std::invalid_argument("simulate_two_timescale: missing model");
  const auto scaled = scale_swap_intensities(config.model, config.epsilon);
  return simulate_bds(*scaled, env, z0, config.horizon, source, replicate, options);
}

OccupationAccumulator::OccupationAccumulator(int subgroups, Weighting weighting)
    : p_(subgroups), weighting_(weighting) {}

namespace {

double interval_weight(Weighting weighting, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (weighting == Weighting::Uniform) return hi - lo;
  return std::exp(-lo) - std::exp(-hi);
}

double total_swap_rate(const IntensityModel& model, const Regime& regime, double t,
                       const PopulationState& z) {
  double total = 0.0;
  const int p = static_cast<int>(z.size());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) total += model.rate(regime, t, z, EventType::swap(i, j));
  return total;
}

}  // namespace

void OccupationAccumulator::add_path(const BdsPath& path, const IntensityModel& scaled_model,
                                     const EnvironmentPath& env, double window_lo,
                                     double window_hi, const OccupationOptions& options) {
  if (!(window_hi > window_lo)) throw std::invalid_argument("occupation window is empty");
  if (window_lo < 0.0 || window_hi > path.horizon)
    throw std::invalid_argument("occupation window extends beyond the path horizon");
  if (options.weighting != weighting_)
    throw std::invalid_argument("occupation weighting differs from the accumulator's");
  if (path.subgroups() != p_) throw std::invalid_argument("occupation: dimension mismatch");

  PopulationState z = path.initial_state;
  std::int64_t n = aggregate(z);

  auto burn_until = [&](double segment_start, const PopulationState& state) {
    if (options.burn_in_expected_swaps <= 0.0) return segment_start;
    const double rate =
        total_swap_rate(scaled_model, env.regime_at(segment_start), segment_start, state);
    if (!(rate > 0.0)) return segment_start;
    return segment_start + options.burn_in_expected_swaps / rate;
  };

  double admissible_from = burn_until(0.0, z);
  double t_prev = 0.0;

  auto account = [&](double until) {
    const double lo = std::max({t_prev, window_lo, admissible_from});
    const double hi = std::min(until, window_hi);
    const double w = interval_weight(weighting_, lo, hi);
    if (w > 0.0) {
      auto level = enumerate_level_set(n, p_);
      auto& dwell = dwell_[n];
      if (dwell.empty()) dwell.assign(level->size(), 0.0);
      dwell[level->index_of(z)] += w;
    }
  };

  for (const auto& ev : path.events) {
    account(ev.time);
    apply_event(z, ev.event);
    if (ev.event.kind != EventKind::Swap) {
      n = aggregate(z);
      admissible_from = burn_until(ev.time, z);
    }
    t_prev = ev.time;
  }
  account(path.horizon);
}

void OccupationAccumulator::merge(const OccupationAccumulator& other) {
  if (other.p_ != p_ || other.weighting_ != weighting_)
    throw std::invalid_argument("occupation merge: incompatible accumulators");
  for (const auto& [n, dwell] : other.dwell_) {
    auto& mine = dwell_[n];
    if (mine.empty()) mine.assign(dwell.size(), 0.0);
    for (std::size_t a = 0; a < dwell.size(); ++a) mine[a] += dwell[a];
  }
}

std::vector<std::int64_t> OccupationAccumulator::sizes() const {
  std::vector<std::int64_t> out;
  out.reserve(dwell_.size());
  for (const auto& [n, _] : dwell_) out.push_back(n);
  return out;
}

double OccupationAccumulator::total_weight(std::int64_t n) const {
  auto it = dwell_.find(n);
  if (it == dwell_.end()) return 0.0;
  double total = 0.0;
  for (double w : it->second) total += w;
  return total;
}

OccupationKernel OccupationAccumulator::kernel(std::int64_t n) const {
  auto it = dwell_.find(n);
  if (it == dwell_.end())
    throw std::invalid_argument("occupation kernel: no mass at size " + std::to_string(n));
  OccupationKernel kernel;
  kernel.n = n;
  kernel.states = enumerate_level_set(n, p_);
  kernel.weights = it->second;
  kernel.weighting = weighting_;
  for (double w : kernel.weights) kernel.total_weight += w;
  if (kernel.total_weight > 0.0)
    for (auto& w : kernel.weights) w /= kernel.total_weight;
  return kernel;
}

namespace {

std::vector<double> residual_impl(std::span<const double> weights, const SwapGenerator& gen) {
  if (weights.size() != gen.size())
    throw std::invalid_argument("averaging_residual: kernel/generator indexing mismatch");
  return gen.apply_left(weights);
}

}  // namespace

std::vector<double> averaging_residual(const OccupationKernel& kernel,
                                       const SwapGenerator& generator) {
  return residual_impl(kernel.weights, generator);
}

std::vector<double> averaging_residual(const InvariantKernel& kernel,
                                       const SwapGenerator& generator) {
  return residual_impl(kernel.probabilities, generator);
}

}  // namespace bds
