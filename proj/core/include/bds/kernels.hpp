#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bds/level_set.hpp"

namespace bds {

// Stationary distribution of a frozen swap chain on the level set U_n,
// in level-set indexing.
struct InvariantKernel {
  std::int64_t n{0};
  std::shared_ptr<const LevelSet> states;
  std::vector<double> probabilities;
  double residual_norm{0.0};  // ||pi L||_inf reported by the solver
};

enum class Weighting { Uniform, Exponential };

// Time-weighted visitation of U_n states, pooled over inter-demographic
// segments (and replicates). `weights` are normalized; `total_weight` is the
// accumulated weighted time behind them.
struct OccupationKernel {
  std::int64_t n{0};
  std::shared_ptr<const LevelSet> states;
  std::vector<double> weights;
  double total_weight{0.0};
  Weighting weighting{Weighting::Uniform};
};

}  // namespace bds
