#pragma once

#include <memory>
#include <shared_mutex>

#include "bds/engine.hpp"
#include "bds/environment.hpp"
#include "bds/intensity.hpp"
#include "bds/kernels.hpp"

namespace bds {

// Generator of the frozen swap chain on the level set U_n: off-diagonal
// entry (z -> z + e_j - e_i) is the swap(i,j) rate at z, diagonal is minus
// the row sum. Stored as positive off-diagonal entries plus the diagonal.
struct SwapGenerator {
  std::int64_t n{0};
  std::shared_ptr<const LevelSet> states;
  struct Entry {
    std::size_t row{0};
    std::size_t col{0};
    double rate{0.0};
  };
  std::vector<Entry> off_diagonal;
  std::vector<double> diagonal;

  std::size_t size() const { return diagonal.size(); }

  // weights^T L (row vector times generator).
  std::vector<double> apply_left(std::span<const double> weights) const;
};

SwapGenerator build_swap_generator(const IntensityModel& model, const Regime& regime, double t,
                                   std::int64_t n, std::size_t cap = default_level_set_cap());

// Solves pi L = 0, sum pi = 1 by a sparse direct solve with one balance
// equation replaced by the normalization. Requires exactly one closed
// communicating class in the positive-rate digraph; pi is supported there.
// Throws UniquenessFailureError when several closed classes exist.
InvariantKernel stationary_distribution(const SwapGenerator& generator,
                                        double residual_tolerance = 1e-10);

// Demographic rates averaged against an invariant kernel.
struct AveragedIntensity {
  std::vector<double> birth;  // per subgroup
  std::vector<double> death;
  double birth_aggregate{0.0};
  double death_aggregate{0.0};
};
AveragedIntensity averaged_intensity(const InvariantKernel& kernel, const IntensityModel& model,
                                     const Regime& regime, double t);

// Lazily solved invariant kernels keyed by (regime table index, size).
// Safe for concurrent readers with single-writer insertion.
class KernelCache {
 public:
  std::shared_ptr<const InvariantKernel> get(const IntensityModel& model, const Regime& regime,
                                             int regime_index, double t, std::int64_t n);

 private:
  std::shared_mutex mutex_;
  std::map<std::pair<int, std::int64_t>, std::shared_ptr<const InvariantKernel>> cache_;
};

// Aggregate-level path of the averaged birth-death limit: 2p demographic
// components, scalar population size.
struct AggregatePath {
  std::int64_t initial_size{0};
  std::vector<PathEvent> events;
  double horizon{0.0};

  std::int64_t size_at(double t) const;
  std::int64_t birth_count_at(double t) const;
  std::int64_t death_count_at(double t) const;
};

// Simulates the limit birth-death process whose demographic rates are the
// base model's, averaged against the invariant kernel at the current
// aggregate size. Runs on the engine's dominating-skeleton machinery with
// the base model's demographic dominators; kernels are solved lazily and
// cached per (regime, size).
AggregatePath simulate_limit_process(const IntensityModel& model, const EnvironmentPath& env,
                                     std::int64_t initial_size, double horizon,
                                     const RandomSource& source, std::uint64_t replicate,
                                     KernelCache& cache, const EngineOptions& options = {});

}  // namespace bds
