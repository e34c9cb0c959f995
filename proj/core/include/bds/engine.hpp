#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "bds/environment.hpp"
#include "bds/intensity.hpp"
#include "bds/path.hpp"
#include "bds/random.hpp"
#include "bds/skeleton.hpp"

namespace bds {

struct EngineOptions {
  // Sampled model checks: domination of every evaluated rate by the declared
  // bounds, and strong order between coupled models.
  bool verify{false};
  // Required for models whose growth class is UserAsserted.
  bool user_asserts_feller{false};
  // Explosion guard on the skeleton size.
  std::size_t max_records{10'000'000};
};

// Generates the dominating skeleton G = (G^b, G^d, G^s) over [0, horizon].
// Birth components run at the declared birth bounds evaluated at
// z0_total + (births so far); death and swap components run at the model's
// sup-by-size at the same running total. Between regime switches and birth
// jumps every rate is constant, so the simulation is exact competing
// exponentials with rate refreshes at those boundaries only. Births, deaths
// and swaps consume separate streams, which keeps the demographic components
// of the skeleton identical across any rescaling of swap intensities under a
// shared seed.
JumpSkeleton simulate_dominating(const IntensityModel& model, const EnvironmentPath& env,
                                 const PopulationState& z0, double horizon,
                                 const RandomSource& source, std::uint64_t replicate = 0,
                                 const EngineOptions& options = {});

// Walks the skeleton in time order and accepts each record iff its mark lies
// below the model's rate at the pre-event state, using the regime in force
// just before the record time. The result is the unique solution of the
// counting SDE restricted to this skeleton.
BdsPath thin_to_bds(const JumpSkeleton& skeleton, const IntensityModel& model,
                    const EnvironmentPath& env, const PopulationState& z0,
                    const EngineOptions& options = {});

// thin_to_bds plus the per-record acceptance flags (for coupling reuse and
// path dumps).
struct ThinTrace {
  BdsPath path;
  std::vector<char> accepted;
};
ThinTrace thin_to_bds_traced(const JumpSkeleton& skeleton, const IntensityModel& model,
                             const EnvironmentPath& env, const PopulationState& z0,
                             const EngineOptions& options = {});

struct BdsRun {
  JumpSkeleton skeleton;
  BdsPath path;
};
BdsRun simulate_bds(const IntensityModel& model, const EnvironmentPath& env,
                    const PopulationState& z0, double horizon, const RandomSource& source,
                    std::uint64_t replicate = 0, const EngineOptions& options = {});

// Coupled pair of a dominated ("low") and dominating ("high") model on shared
// randomness. The high path is thinned from the skeleton built on the high
// model's dominators; the low path is then thinned recursively from the high
// path's accepted records using their original marks. Every accepted low
// event is an accepted high event by construction; the low path solves its
// own SDE whenever the models are strongly ordered, which the caller asserts
// and verify mode samples.
struct CoupledPair {
  JumpSkeleton skeleton;
  BdsPath high;
  BdsPath low;
};
CoupledPair coupled_pair(const IntensityModel& model_low, const IntensityModel& model_high,
                         const EnvironmentPath& env, const PopulationState& z0, double horizon,
                         const RandomSource& source, std::uint64_t replicate = 0,
                         const EngineOptions& options = {});

// True iff every (time, event) of `a` appears in `b`.
struct DominationCheck {
  bool dominated{true};
  std::optional<PathEvent> first_violation;
};
DominationCheck check_strong_domination(std::span<const PathEvent> a,
                                        std::span<const PathEvent> b);
DominationCheck check_strong_domination(const BdsPath& a, const BdsPath& b);
DominationCheck check_strong_domination(const BdsPath& a, const JumpSkeleton& b);
DominationCheck check_strong_domination(const JumpSkeleton& a, const BdsPath& b);
DominationCheck check_strong_domination(const JumpSkeleton& a, const JumpSkeleton& b);

// Pathwise invariants used by the verification harness.
bool check_support_condition(const BdsPath& path);                       // no event out of an empty subgroup
bool check_aggregate_bound(const BdsPath& path, const JumpSkeleton& g);  // Z_total <= Z0_total + G^b_total

// Intensity evaluated along a path: (t, state just before t, event) -> rate.
using IntensityEvaluator = std::function<double(double, const PopulationState&, const EventType&)>;
IntensityEvaluator make_intensity_evaluator(const IntensityModel& model,
                                            const EnvironmentPath& env);

// Rebuilds the dominated path x from the dominating path y by re-thinning a
// marked version of y at the component-wise intensity ratio: jumps shared
// with x get marks u * ratio, jumps of y - x get marks ratio + (1-ratio) * v,
// with fresh independent uniforms u, v. Accepting marks in ]0, ratio], where
// the ratio is re-evaluated at the reconstruction's own pre-event state,
// recovers x event for event.
BdsPath reconstruct_by_ratio(const BdsPath& x, const BdsPath& y, const IntensityEvaluator& lambda_x,
                             const IntensityEvaluator& lambda_y, const RandomSource& source,
                             std::uint64_t replicate = 0);

// Exact per-event-type residuals N_t - int_0^t mu(s, Z_{s-}) ds at the given
// checkpoints (piecewise-constant regimes make the integral a finite sum).
struct CompensatorResiduals {
  std::vector<double> checkpoints;
  std::vector<std::vector<double>> residuals;  // [checkpoint][event index]
};
CompensatorResiduals compensator_residual(const BdsPath& path, const IntensityModel& model,
                                          const EnvironmentPath& env,
                                          const std::vector<double>& checkpoints);

}  // namespace bds
