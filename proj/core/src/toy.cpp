#include "bds/toy.hpp"

#include <cmath>
#include <stdexcept>

namespace bds {

Regime ToyParams::to_regime(double k) const {
  Regime regime;
  regime.k = k;
  regime.death = {d1, d2};
  regime.birth = {b, b};
  regime.immigration = {lambda, lambda};
  regime.swap_coeff = {0.0, k12, k21, 0.0};
  return regime;
}

ToyParams toy_params_from_regime(const Regime& regime) {
  ToyParams params;
  params.d1 = regime.death.at(0);
  params.d2 = regime.death.at(1);
  params.b = regime.birth.at(0);
  params.lambda = regime.immigration.at(0);
  params.k12 = regime.swap_coeff.at(1);
  params.k21 = regime.swap_coeff.at(2);
  return params;
}

namespace {

class ToyModel final : public IntensityModel {
 public:
  std::string name() const override { return "toy"; }
  int subgroups() const override { return 2; }

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
      case EventKind::Swap: {
        if (ev.source == 0)  // crowding out of the favorable patch
          return regime.swap_coeff[1] * static_cast<double>(z[0] + z[1]) *
                 static_cast<double>(z[0]);
        return regime.swap_coeff[2] * static_cast<double>(z[1]);
      }
    }
    return 0.0;
  }

  double birth_bound(const Regime& regime, double /*t*/, int j, std::int64_t n) const override {
    return regime.k * (regime.birth[static_cast<std::size_t>(j)] * static_cast<double>(n) +
                       regime.immigration[static_cast<std::size_t>(j)]);
  }

  double sup_by_size(const Regime& regime, double /*t*/, const EventType& ev,
                     std::int64_t n) const override {
    const auto size = static_cast<double>(n);
    if (ev.kind == EventKind::Death)
      return regime.death[static_cast<std::size_t>(ev.source)] * size;
    if (ev.source == 0) return regime.swap_coeff[1] * size * size;  // peak at z = (n, 0)
    return regime.swap_coeff[2] * size;
  }

  GrowthClass growth_class() const override { return GrowthClass::Affine; }
};

}  // namespace

std::shared_ptr<IntensityModel> make_toy_model() { return std::make_shared<ToyModel>(); }

double toy_p1(double alpha, std::int64_t n) {
  if (alpha < 0.0 || n < 0) throw std::invalid_argument("toy_p1: bad arguments");
  return 1.0 / (alpha * static_cast<double>(n) + 1.0);
}

InvariantKernel toy_invariant(double alpha, std::int64_t n) {
  InvariantKernel kernel;
  kernel.n = n;
  kernel.states = enumerate_level_set(n, 2);
  kernel.probabilities.assign(kernel.states->size(), 0.0);
  const double p1 = toy_p1(alpha, n);
  if (p1 == 1.0) {
    // alpha = 0 or n = 0: everyone sits in patch 1, state (n, 0).
    kernel.probabilities.back() = 1.0;
    return kernel;
  }
  // Lexicographic state a is (a, n - a): exactly a individuals in patch 1.
  // Binomial pmf built by the ratio recurrence.
  double pmf = std::pow(1.0 - p1, static_cast<double>(n));
  for (std::int64_t a = 0; a <= n; ++a) {
    kernel.probabilities[static_cast<std::size_t>(a)] = pmf;
    if (a < n)
      pmf *= (static_cast<double>(n - a) / static_cast<double>(a + 1)) * (p1 / (1.0 - p1));
  }
  return kernel;
}

double toy_averaged_death(const ToyParams& params, std::int64_t n) {
  const double p1 = toy_p1(params.alpha(), n);
  return (params.d1 * p1 + params.d2 * (1.0 - p1)) * static_cast<double>(n);
}

}  // namespace bds
