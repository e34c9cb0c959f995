#pragma once

#include <map>
#include <memory>

#include "bds/averaging.hpp"
#include "bds/engine.hpp"
#include "bds/kernels.hpp"

namespace bds {

// Two-timescale setup: swap intensities (and their dominators) scaled by
// 1/epsilon, demographic intensities untouched.
struct TwoTimescaleConfig {
  std::shared_ptr<const IntensityModel> model;
  double epsilon{1.0};
  double horizon{0.0};
  int replicates{1};
};

// Decorator multiplying swap rates and swap sup-by-size bounds by
// 1/epsilon. Birth and death surfaces pass through, so the demographic part
// of the dominating skeleton is epsilon-independent under a shared seed.
std::shared_ptr<const IntensityModel> scale_swap_intensities(
    std::shared_ptr<const IntensityModel> base, double epsilon);

BdsRun simulate_two_timescale(const TwoTimescaleConfig& config, const EnvironmentPath& env,
                              const PopulationState& z0, const RandomSource& source,
                              std::uint64_t replicate = 0, const EngineOptions& options = {});

struct OccupationOptions {
  Weighting weighting{Weighting::Uniform};
  // Time discarded after each demographic event, expressed as a count of
  // expected inter-swap times of the scaled chain at the segment's starting
  // state. Passing c/epsilon discards roughly c relaxation periods of the
  // unscaled swap chain, independent of epsilon.
  double burn_in_expected_swaps{0.0};
};

// Pools time-weighted state visitation between demographic events, grouped
// by the (constant) population size of each segment. Merging accumulators is
// associative, so replicates can be pooled in any fixed order.
class OccupationAccumulator {
 public:
  OccupationAccumulator(int subgroups, Weighting weighting);

  void add_path(const BdsPath& path, const IntensityModel& scaled_model,
                const EnvironmentPath& env, double window_lo, double window_hi,
                const OccupationOptions& options);

  void merge(const OccupationAccumulator& other);

  std::vector<std::int64_t> sizes() const;
  double total_weight(std::int64_t n) const;
  OccupationKernel kernel(std::int64_t n) const;

 private:
  int p_;
  Weighting weighting_;
  std::map<std::int64_t, std::vector<double>> dwell_;
};

// Row-vector product of an estimated kernel with a frozen swap generator on
// the same level set; the averaging identity drives this to zero as the
// swap timescale separates.
std::vector<double> averaging_residual(const OccupationKernel& kernel,
                                       const SwapGenerator& generator);
std::vector<double> averaging_residual(const InvariantKernel& kernel,
                                       const SwapGenerator& generator);

}  // namespace bds
