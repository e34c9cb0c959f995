#pragma once

#include <memory>

#include "bds/intensity.hpp"
#include "bds/kernels.hpp"

namespace bds {

// Two-patch habitat model. Patch 1 is favorable (d1 <= d2). Individuals die
// at per-capita rate d_i, give birth at rate b (same in both patches, plus
// immigration at rate lambda into each patch), crowd out of patch 1 at rate
// k12 * z_total per individual, and return at constant per-capita rate k21.
struct ToyParams {
  double d1{0.0};
  double d2{0.0};
  double b{0.0};
  double lambda{0.0};
  double k12{0.0};
  double k21{0.0};

  double alpha() const { return k12 / k21; }
  Regime to_regime(double k = 1.0) const;
};

ToyParams toy_params_from_regime(const Regime& regime);

// Event rates: death_i = d_i z^i, birth_j = b z^j + lambda,
// swap(1->2) = (k12 z_total) z^1, swap(2->1) = k21 z^2.
// Closed-form dominators: swap(1->2) sup = k12 n^2, swap(2->1) sup = k21 n,
// death_i sup = d_i n, birth bound = k (b n + lambda).
std::shared_ptr<IntensityModel> make_toy_model();

// Single-individual probability of sitting in patch 1 under the frozen swap
// chain at total size n: 1 / (alpha n + 1).
double toy_p1(double alpha, std::int64_t n);

// Stationary law of the frozen swap chain on U_n: the patch-1 head count is
// Binomial(n, toy_p1(alpha, n)), mapped onto the level-set ordering.
InvariantKernel toy_invariant(double alpha, std::int64_t n);

// Aggregate death rate of the averaged birth-death limit:
// (d1 p1(n) + d2 p2(n)) n, with alpha = k12/k21.
double toy_averaged_death(const ToyParams& params, std::int64_t n);

}  // namespace bds
