#include <doctest.h>

#include <cmath>

#include "bds/stats.hpp"
#include "bds/toy.hpp"

using namespace bds;

namespace {

std::int64_t draw_poisson(RngStream& rng, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t count = 0;
  double product = rng.uniform_open01();
  while (product > limit) {
    ++count;
    product *= rng.uniform_open01();
  }
  return count;
}

std::vector<std::int64_t> poisson_sample(RngStream& rng, double mean, int n) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = draw_poisson(rng, mean);
  return out;
}

double gaussian(RngStream& rng) {
  return std::sqrt(-2.0 * std::log(rng.uniform_open01())) *
         std::cos(6.283185307179586 * rng.uniform01());
}

}  // namespace

TEST_CASE("oracle with zero intensity is silent") {
  auto linear = make_linear_model(2);
  Regime zero;
  zero.death = {0, 0};
  zero.birth = {0, 0};
  zero.immigration = {0, 0};
  zero.swap_coeff = {0, 0, 0, 0};
  auto env = EnvironmentPath::constant(zero);
  RandomSource source(200);
  const auto path = oracle_simulate(*linear, env, {3, 3}, 10.0, source);
  CHECK(path.events.empty());
}

TEST_CASE("oracle counts match the Poisson law for a constant birth rate") {
  auto linear = make_linear_model(2);
  Regime regime;
  regime.death = {0, 0};
  regime.birth = {0, 0};
  regime.immigration = {3.0, 0.0};
  regime.swap_coeff = {0, 0, 0, 0};
  auto env = EnvironmentPath::constant(regime);
  RandomSource source(201);
  const double horizon = 1.5;
  const int replicates = 10000;
  double sum = 0.0;
  for (int rep = 0; rep < replicates; ++rep)
    sum += static_cast<double>(oracle_simulate(*linear, env, {0, 0}, horizon, source,
                                               static_cast<std::uint64_t>(rep))
                                   .events.size());
  const double mean = sum / replicates;
  const double target = 3.0 * horizon;
  const double se = std::sqrt(target / replicates);
  CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("tv distance basics") {
  const std::vector<std::int64_t> a{1, 2, 2, 3};
  CHECK(tv_distance(std::span(a), std::span(a)) == doctest::Approx(0.0));

  const std::vector<std::int64_t> b{7, 8, 8, 9};
  CHECK(tv_distance(std::span(a), std::span(b)) == doctest::Approx(1.0));

  const std::vector<std::int64_t> empty;
  CHECK_THROWS_AS(tv_distance(std::span(empty), std::span(a)), std::invalid_argument);
}

TEST_CASE("tv distance against the exact binomial pmf is small at 1e5 draws") {
  RandomSource source(202);
  auto rng = source.stream("binom");
  std::vector<std::int64_t> sample(100000);
  for (auto& v : sample) {
    std::int64_t heads = 0;
    for (int toss = 0; toss < 2; ++toss)
      if (rng.uniform01() < 1.0 / 3.0) ++heads;
    v = heads;
  }
  const std::map<std::int64_t, double> exact{{0, 4.0 / 9.0}, {1, 4.0 / 9.0}, {2, 1.0 / 9.0}};
  CHECK(tv_distance(std::span(sample), exact) < 0.01);
}

TEST_CASE("tv distance is symmetric and satisfies the triangle inequality") {
  RandomSource source(203);
  auto rng = source.stream("tv");
  for (int trial = 0; trial < 20; ++trial) {
    auto a = poisson_sample(rng, 2.0 + rng.uniform01(), 500);
    auto b = poisson_sample(rng, 2.0 + rng.uniform01(), 400);
    auto c = poisson_sample(rng, 2.0 + rng.uniform01(), 600);
    const double ab = tv_distance(std::span(a), std::span(b));
    const double ba = tv_distance(std::span(b), std::span(a));
    const double ac = tv_distance(std::span(a), std::span(c));
    const double cb = tv_distance(std::span(c), std::span(b));
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("chi-square test on identical samples is degenerate") {
  const std::vector<std::int64_t> a{1, 1, 2, 2, 2, 3, 3, 3, 3, 5, 5, 5};
  const auto result = two_sample_test(std::span(a), std::span(a));
  CHECK(result.p_value == doctest::Approx(1.0));
}

TEST_CASE("chi-square test separates distinct Poisson laws") {
  RandomSource source(204);
  auto rng = source.stream("chi2");
  const auto a = poisson_sample(rng, 1.0, 10000);
  const auto b = poisson_sample(rng, 5.0, 10000);
  const auto result = two_sample_test(std::span(a), std::span(b));
  CHECK(result.p_value < 1e-6);
}

TEST_CASE("chi-square test accepts same-law samples") {
  RandomSource source(205);
  auto rng = source.stream("chi2-null");
  const auto a = poisson_sample(rng, 3.0, 20000);
  const auto b = poisson_sample(rng, 3.0, 20000);
  const auto result = two_sample_test(std::span(a), std::span(b));
  CHECK(result.p_value > 0.01);
}

TEST_CASE("thinning and the oracle agree in distribution") {
  auto toy = make_toy_model();
  const ToyParams params{1.0, 2.0, 0.2, 0.1, 1.0, 1.0};
  auto env = EnvironmentPath::constant(params.to_regime());
  RandomSource thinning_seed(206), oracle_seed(207);

  const int replicates = 20000;
  std::vector<std::int64_t> births_thin, births_oracle, swaps_thin, swaps_oracle;
  for (int rep = 0; rep < replicates; ++rep) {
    const auto run = simulate_bds(*toy, env, {1, 1}, 2.0, thinning_seed,
                                  static_cast<std::uint64_t>(rep));
    births_thin.push_back(run.path.birth_count_at(2.0));
    swaps_thin.push_back(run.path.swap_count_at(2.0));
    const auto oracle = oracle_simulate(*toy, env, {1, 1}, 2.0, oracle_seed,
                                        static_cast<std::uint64_t>(rep));
    births_oracle.push_back(oracle.birth_count_at(2.0));
    swaps_oracle.push_back(oracle.swap_count_at(2.0));
  }
  CHECK(two_sample_test(std::span(births_thin), std::span(births_oracle)).p_value > 0.01);
  CHECK(two_sample_test(std::span(swaps_thin), std::span(swaps_oracle)).p_value > 0.01);
}

TEST_CASE("residual zero test") {
  std::vector<double> zeros(200, 0.0);
  const auto flat = residual_zero_test(std::span(zeros));
  CHECK(flat.z_score == 0.0);
  CHECK(!flat.flagged);

  RandomSource source(208);
  auto rng = source.stream("gauss");
  std::vector<double> centered(10000), shifted(10000);
  for (std::size_t k = 0; k < centered.size(); ++k) {
    centered[k] = gaussian(rng);
    shifted[k] = gaussian(rng) + 0.5;
  }
  CHECK(!residual_zero_test(std::span(centered)).flagged);
  CHECK(residual_zero_test(std::span(shifted)).flagged);

  std::vector<double> too_small(10, 0.0);
  CHECK_THROWS_AS(residual_zero_test(std::span(too_small)), std::invalid_argument);
}

TEST_CASE("regularized gamma matches known chi-square quantiles") {
  // P(chi2_1 > 3.841) ~ 0.05, P(chi2_2 > 5.991) ~ 0.05.
  CHECK(regularized_gamma_q(0.5, 3.841 / 2.0) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(regularized_gamma_q(1.0, 5.991 / 2.0) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(regularized_gamma_q(2.5, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("empirical laws front the integer tests") {
  const EmpiricalLaw a{"a", {0, 1, 1, 2, 2, 2}};
  const EmpiricalLaw b{"b", {0, 1, 1, 2, 2, 2}};
  CHECK(tv_distance(a, b) == doctest::Approx(0.0));
  CHECK(two_sample_test(a, b).p_value == doctest::Approx(1.0));

  const EmpiricalLaw fractional{"frac", {0.5, 1.0}};
  CHECK_THROWS_AS(fractional.integer_samples(), std::invalid_argument);
}

TEST_CASE("joint tv distance on paired counts") {
  std::vector<std::array<std::int64_t, 2>> a{{0, 0}, {1, 0}, {1, 1}, {0, 0}};
  CHECK(tv_distance_joint(std::span(a), std::span(a)) == doctest::Approx(0.0));
  std::vector<std::array<std::int64_t, 2>> b{{5, 5}, {6, 6}, {5, 5}, {6, 6}};
  CHECK(tv_distance_joint(std::span(a), std::span(b)) == doctest::Approx(1.0));
}
