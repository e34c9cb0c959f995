#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bds/engine.hpp"

namespace bds {

// Named sample of one observable across replicates.
struct EmpiricalLaw {
  std::string name;
  std::vector<double> samples;

  std::size_t count() const { return samples.size(); }

  // Rounds to integers; throws if any sample is not integral.
  std::vector<std::int64_t> integer_samples() const;
};

// Direct competing-exponentials simulation: evaluates the full rate vector at
// the current state, waits an exponential with the total rate, picks the
// event proportionally. Shares no code with the thinning path; used as the
// independent oracle in distributional-equivalence tests.
BdsPath oracle_simulate(const IntensityModel& model, const EnvironmentPath& env,
                        const PopulationState& z0, double horizon, const RandomSource& source,
                        std::uint64_t replicate = 0, std::size_t max_events = 10'000'000);

// Half L1 distance between empirical frequencies (or against an exact pmf).
double tv_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
double tv_distance(std::span<const std::int64_t> samples,
                   const std::map<std::int64_t, double>& exact);
double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance_joint(std::span<const std::array<std::int64_t, 2>> a,
                         std::span<const std::array<std::int64_t, 2>> b);

// Chi-square homogeneity test on integer observables. Adjacent value bins
// are merged until every expected count reaches min_expected; a single
// surviving bin degenerates to p = 1.
struct ChiSquareResult {
  double statistic{0.0};
  int dof{0};
  double p_value{1.0};
  std::size_t bins{0};
};
ChiSquareResult two_sample_test(std::span<const std::int64_t> a,
                                std::span<const std::int64_t> b, double min_expected = 5.0);

// Flags a sample whose mean sits more than 3 standard errors from zero.
struct ResidualZeroSummary {
  double mean{0.0};
  double standard_error{0.0};
  double z_score{0.0};
  bool flagged{false};
};
ResidualZeroSummary residual_zero_test(std::span<const double> residuals);

// Upper regularized incomplete gamma Q(a, x); chi-square survival is
// Q(dof/2, statistic/2).
double regularized_gamma_q(double a, double x);

// EmpiricalLaw fronts for the span-based tests above.
double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);
ChiSquareResult two_sample_test(const EmpiricalLaw& a, const EmpiricalLaw& b,
                                double min_expected = 5.0);
ResidualZeroSummary residual_zero_test(const EmpiricalLaw& residuals);

}  // namespace bds
