#include "bds/intensity.hpp"

#include <algorithm>
#include <cmath>

#include "bds/errors.hpp"
#include "bds/level_set.hpp"

namespace bds {

double IntensityModel::sup_by_size(const Regime& regime, double t, const EventType& ev,
                                   std::int64_t n) const {
  if (ev.kind == EventKind::Birth)
    throw std::invalid_argument("sup_by_size: birth events use birth_bound");
  double sup = 0.0;
  for (std::int64_t m = 0; m <= n; ++m) {
    auto level = enumerate_level_set(m, subgroups());
    for (const auto& z : level->states()) sup = std::max(sup, rate(regime, t, z, ev));
  }
  return sup;
}

std::vector<double> evaluate(const IntensityModel& model, const EventSpace& space,
                             const Regime& regime, double t, const PopulationState& z,
                             bool verify) {
  std::vector<double> rates(static_cast<std::size_t>(space.size()));
  for (int k = 0; k < space.size(); ++k) {
    const EventType& ev = space.event(k);
    const double r = model.rate(regime, t, z, ev);
    if (!(r >= 0.0) || !std::isfinite(r))
      throw ModelViolationError("model '" + model.name() + "' returned rate " +
                                std::to_string(r) + " for " + to_string(ev));
    rates[static_cast<std::size_t>(k)] = r;
  }
  if (verify) {
    const std::int64_t n = aggregate(z);
    for (int k = 0; k < space.size(); ++k) {
      const EventType& ev = space.event(k);
      const double r = rates[static_cast<std::size_t>(k)];
      if (ev.kind != EventKind::Birth && z[static_cast<std::size_t>(ev.source)] == 0 && r != 0.0)
        throw ModelViolationError("support condition violated: " + to_string(ev) +
                                  " has rate " + std::to_string(r) + " out of an empty subgroup");
      if (ev.kind == EventKind::Birth) {
        const double bound = model.birth_bound(regime, t, ev.dest, n);
        if (r > bound * (1.0 + 1e-12))
          throw DominationViolationError("birth rate " + std::to_string(r) +
                                         " exceeds declared dominator " + std::to_string(bound));
      }
    }
  }
  return rates;
}

std::vector<double> dominating_birth_bound(const IntensityModel& model, const Regime& regime,
                                           double t, std::int64_t n) {
  std::vector<double> bounds(static_cast<std::size_t>(model.subgroups()));
  for (int j = 0; j < model.subgroups(); ++j)
    bounds[static_cast<std::size_t>(j)] = model.birth_bound(regime, t, j, n);
  return bounds;
}

void verify_domination_sampled(const IntensityModel& model, const Regime& regime, double t,
                               std::int64_t max_size, int samples, RngStream& rng) {
  const EventSpace space(model.subgroups());
  for (int s = 0; s < samples; ++s) {
    const auto n = static_cast<std::int64_t>(rng.uniform01() * static_cast<double>(max_size + 1));
    auto level = enumerate_level_set(n, model.subgroups());
    const auto& z = level->state(static_cast<std::size_t>(
        rng.uniform01() * static_cast<double>(level->size())));
    for (int k = 0; k < space.size(); ++k) {
      const EventType& ev = space.event(k);
      const double r = model.rate(regime, t, z, ev);
      const double bound = ev.kind == EventKind::Birth
                               ? model.birth_bound(regime, t, ev.dest, n)
                               : model.sup_by_size(regime, t, ev, n);
      if (r > bound * (1.0 + 1e-12))
        throw DominationViolationError(
            "sampled domination violation for " + to_string(ev) + " at size " +
            std::to_string(n) + ": rate " + std::to_string(r) + " > bound " +
            std::to_string(bound));
    }
  }
}

double feller_diagnostic(const std::vector<std::function<double(std::int64_t)>>& growth,
                         std::int64_t horizon) {
  double sum = 0.0;
  for (std::int64_t z = 1; z <= horizon; ++z) {
    double denom = 0.0;
    for (const auto& g : growth) denom += g(z);
    if (!(denom > 0.0))
      throw ModelViolationError("feller_diagnostic: growth functions sum to zero at z=" +
                                std::to_string(z));
    sum += 1.0 / denom;
  }
  return sum;
}

namespace {

class LinearModel final : public IntensityModel {
 public:
  explicit LinearModel(int subgroups) : p_(subgroups) {}

  std::string name() const override { return "linear"; }
  int subgroups() const override { return p_; }

  double rate(const Regime& regime, double /*t*/, const PopulationState& z,
              const EventType& ev) const override {
    switch (ev.kind) {
      case EventKind::Death:
        return regime.death[static_cast<std::size_t>(ev.source)] *
               static_cast<double>(z[static_cast<std::size_t>(ev.source)]);
      case EventKind::Birth:
        return regime.birth[static_cast<std::size_t>(ev.dest)] *
                   static_cast<double>(z[static_cast<std::size_t>(ev.dest)]) +
               regime.immigration[static_cast<std::size_t>(ev.dest)];
      case EventKind::Swap:
        return regime.swap(ev.source, ev.dest, p_) *
               static_cast<double>(z[static_cast<std::size_t>(ev.source)]);
    }
    return 0.0;
  }

  double birth_bound(const Regime& regime, double /*t*/, int j, std::int64_t n) const override {
    return regime.k * (regime.birth[static_cast<std::size_t>(j)] * static_cast<double>(n) +
                       regime.immigration[static_cast<std::size_t>(j)]);
  }

  double sup_by_size(const Regime& regime, double /*t*/, const EventType& ev,
                     std::int64_t n) const override {
    if (ev.kind == EventKind::Death)
      return regime.death[static_cast<std::size_t>(ev.source)] * static_cast<double>(n);
    return regime.swap(ev.source, ev.dest, p_) * static_cast<double>(n);
  }

  GrowthClass growth_class() const override { return GrowthClass::Affine; }

 private:
  int p_;
};

}  // namespace

std::shared_ptr<IntensityModel> make_linear_model(int subgroups) {
  return std::make_shared<LinearModel>(subgroups);
}

}  // namespace bds
