#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bds/environment.hpp"
#include "bds/events.hpp"

namespace bds {

// Growth class of the declared birth dominator g_j. Affine and n*log(n)
// growth are pre-certified non-explosive; anything else needs an explicit
// caller assertion before the engine will simulate with it.
enum class GrowthClass { Affine, LinearTimesLog, UserAsserted };

// Event intensity functional mu(regime, t, z), together with its declared
// domination structure:
//  - birth_bound(j, n): bound on the birth-j rate over populations of size n,
//    nondecreasing in n;
//  - sup_by_size(ev, n): sup of a death/swap rate over all populations of
//    size <= n.
// Rates of events consuming from subgroup i must vanish when z^i = 0.
class IntensityModel {
 public:
  virtual ~IntensityModel() = default;

  virtual std::string name() const = 0;
  virtual int subgroups() const = 0;

  virtual double rate(const Regime& regime, double t, const PopulationState& z,
                      const EventType& ev) const = 0;

  virtual double birth_bound(const Regime& regime, double t, int j, std::int64_t n) const = 0;

  // Default implementation enumerates level sets 0..n; built-in models
  // override with closed forms.
  virtual double sup_by_size(const Regime& regime, double t, const EventType& ev,
                             std::int64_t n) const;

  virtual GrowthClass growth_class() const = 0;
};

// All rates at once, in EventSpace order. Always rejects negative or
// non-finite rates; with verify=true additionally checks the support
// condition and the declared birth dominator at this state.
std::vector<double> evaluate(const IntensityModel& model, const EventSpace& space,
                             const Regime& regime, double t, const PopulationState& z,
                             bool verify = false);

// Per-subgroup birth dominator vector (birth_bound for j = 0..p-1).
std::vector<double> dominating_birth_bound(const IntensityModel& model, const Regime& regime,
                                           double t, std::int64_t n);

// Samples random states of size <= max_size (and random event types) and
// checks every rate against the declared dominators. Throws
// DominationViolationError on the first counterexample.
void verify_domination_sampled(const IntensityModel& model, const Regime& regime, double t,
                               std::int64_t max_size, int samples, RngStream& rng);

// Partial sum of 1 / sum_j g_j(z) for z = 1..horizon. Divergence of the full
// series rules out explosion of the dominating birth process; the partial sum
// is a diagnostic, not a proof.
double feller_diagnostic(const std::vector<std::function<double(std::int64_t)>>& growth,
                         std::int64_t horizon);

// General linear model: death d_i z^i, birth b_j z^j + lambda_j, swap
// k_ij z^i, all coefficients per regime.
std::shared_ptr<IntensityModel> make_linear_model(int subgroups);

}  // namespace bds
