#include <doctest.h>

#include <cmath>

#include "bds/errors.hpp"
#include "bds/intensity.hpp"
#include "bds/random.hpp"
#include "bds/toy.hpp"

using namespace bds;

namespace {

Regime toy_regime(double d1, double d2, double b, double lambda, double k12, double k21) {
  return ToyParams{d1, d2, b, lambda, k12, k21}.to_regime();
}

// Enumeration-based sup oracle, independent of the closed forms.
double sup_by_enumeration(const IntensityModel& model, const Regime& regime, const EventType& ev,
                          std::int64_t n) {
  double sup = 0.0;
  for (std::int64_t m = 0; m <= n; ++m) {
    auto level = enumerate_level_set(m, model.subgroups());
    for (const auto& z : level->states()) sup = std::max(sup, model.rate(regime, 0.0, z, ev));
  }
  return sup;
}

}  // namespace

TEST_CASE("toy rates at the worked example") {
  auto model = make_toy_model();
  const Regime regime = toy_regime(1.0, 2.0, 0.0, 0.0, 1.0, 1.0);
  const PopulationState z{1, 1};
  CHECK(model->rate(regime, 0.0, z, EventType::death(0)) == doctest::Approx(1.0));
  CHECK(model->rate(regime, 0.0, z, EventType::death(1)) == doctest::Approx(2.0));
  CHECK(model->rate(regime, 0.0, z, EventType::swap(0, 1)) == doctest::Approx(2.0));
  CHECK(model->rate(regime, 0.0, z, EventType::swap(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("support condition: empty subgroups emit nothing") {
  auto toy = make_toy_model();
  const Regime regime = toy_regime(1.0, 2.0, 0.5, 0.1, 1.0, 1.0);
  for (std::int64_t n : {0, 1, 4}) {
    const PopulationState z{0, n};
    CHECK(toy->rate(regime, 0.0, z, EventType::death(0)) == 0.0);
    CHECK(toy->rate(regime, 0.0, z, EventType::swap(0, 1)) == 0.0);
    if (n > 0) {
      CHECK(toy->rate(regime, 0.0, z, EventType::death(1)) > 0.0);
      CHECK(toy->rate(regime, 0.0, z, EventType::swap(1, 0)) > 0.0);
    }
  }
}

TEST_CASE("linear model death rates") {
  auto model = make_linear_model(3);
  Regime regime;
  regime.death = {1.0, 2.0, 3.0};
  regime.birth = {0.0, 0.0, 0.0};
  regime.immigration = {0.0, 0.0, 0.0};
  regime.swap_coeff.assign(9, 0.0);
  const PopulationState z{4, 5, 6};
  CHECK(model->rate(regime, 0.0, z, EventType::death(0)) == doctest::Approx(4.0));
  CHECK(model->rate(regime, 0.0, z, EventType::death(1)) == doctest::Approx(10.0));
  CHECK(model->rate(regime, 0.0, z, EventType::death(2)) == doctest::Approx(18.0));
}

TEST_CASE("sup_by_size closed forms match the enumeration oracle") {
  auto toy = make_toy_model();
  const Regime regime = toy_regime(1.0, 2.0, 0.0, 0.0, 1.0, 1.0);

  CHECK(toy->sup_by_size(regime, 0.0, EventType::swap(0, 1), 3) == doctest::Approx(9.0));
  CHECK(toy->sup_by_size(regime, 0.0, EventType::swap(0, 1), 0) == 0.0);
  CHECK(toy->sup_by_size(regime, 0.0, EventType::death(0), 5) == doctest::Approx(5.0));

  for (std::int64_t n : {0, 1, 2, 3, 6}) {
    for (const EventType& ev : {EventType::swap(0, 1), EventType::swap(1, 0),
                                EventType::death(0), EventType::death(1)}) {
      CHECK(toy->sup_by_size(regime, 0.0, ev, n) ==
            doctest::Approx(sup_by_enumeration(*toy, regime, ev, n)));
    }
  }

  // Linear death with d = 2 at sizes up to 5.
  auto linear = make_linear_model(2);
  Regime lin;
  lin.death = {2.0, 0.5};
  lin.birth = {0.0, 0.0};
  lin.immigration = {0.0, 0.0};
  lin.swap_coeff = {0.0, 1.5, 0.7, 0.0};
  CHECK(linear->sup_by_size(lin, 0.0, EventType::death(0), 5) == doctest::Approx(10.0));
  for (std::int64_t n : {0, 1, 4}) {
    for (const EventType& ev : {EventType::swap(0, 1), EventType::swap(1, 0),
                                EventType::death(0), EventType::death(1)}) {
      CHECK(linear->sup_by_size(lin, 0.0, ev, n) ==
            doctest::Approx(sup_by_enumeration(*linear, lin, ev, n)));
    }
  }
}

TEST_CASE("sup_by_size is nondecreasing in n") {
  auto toy = make_toy_model();
  const Regime regime = toy_regime(0.3, 1.2, 0.1, 0.2, 0.8, 1.7);
  for (const EventType& ev : {EventType::swap(0, 1), EventType::swap(1, 0), EventType::death(0),
                              EventType::death(1)}) {
    double prev = -1.0;
    for (std::int64_t n = 0; n <= 12; ++n) {
      const double sup = toy->sup_by_size(regime, 0.0, ev, n);
      CHECK(sup >= prev);
      prev = sup;
    }
  }
}

TEST_CASE("dominating birth bound examples") {
  auto toy = make_toy_model();
  Regime regime = toy_regime(1.0, 2.0, 0.5, 0.1, 1.0, 1.0);
  auto bounds4 = dominating_birth_bound(*toy, regime, 0.0, 4);
  CHECK(bounds4[0] == doctest::Approx(2.1));
  CHECK(bounds4[1] == doctest::Approx(2.1));
  auto bounds0 = dominating_birth_bound(*toy, regime, 0.0, 0);
  CHECK(bounds0[0] == doctest::Approx(0.1));

  regime.k = 0.0;
  for (std::int64_t n : {0, 3, 9}) {
    auto zero = dominating_birth_bound(*toy, regime, 0.0, n);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);
  }
}

TEST_CASE("birth bounds are nondecreasing in n") {
  auto toy = make_toy_model();
  const Regime regime = toy_regime(1.0, 2.0, 0.4, 0.3, 1.0, 1.0);
  double prev = -1.0;
  for (std::int64_t n = 0; n <= 20; ++n) {
    const double bound = toy->birth_bound(regime, 0.0, 0, n);
    CHECK(bound >= prev);
    prev = bound;
  }
}

TEST_CASE("randomized domination property over states and regimes") {
  auto toy = make_toy_model();
  RandomSource source(777);
  RngStream rng = source.stream("test-domination");
  for (int regime_draw = 0; regime_draw < 10; ++regime_draw) {
    const Regime regime =
        toy_regime(rng.uniform01() * 2, 2 + rng.uniform01(), rng.uniform01(), rng.uniform01(),
                   rng.uniform01() * 3, 0.2 + rng.uniform01());
    CHECK_NOTHROW(verify_domination_sampled(*toy, regime, 0.0, 12, 50, rng));
  }
}

TEST_CASE("evaluate validates model output") {
  auto toy = make_toy_model();
  const EventSpace space(2);
  Regime regime = toy_regime(1.0, 2.0, 0.5, 0.1, 1.0, 1.0);
  const PopulationState z{2, 3};
  auto rates = evaluate(*toy, space, regime, 0.0, z, true);
  CHECK(rates.size() == static_cast<std::size_t>(space.size()));

  // Understated dominator (k < 1) trips the verified birth check.
  regime.k = 0.1;
  CHECK_THROWS_AS(evaluate(*toy, space, regime, 0.0, z, true), DominationViolationError);
  CHECK_NOTHROW(evaluate(*toy, space, regime, 0.0, z, false));
}

TEST_CASE("negative and non-finite rates are rejected outright") {
  struct Broken final : IntensityModel {
    std::string name() const override { return "broken"; }
    int subgroups() const override { return 1; }
    double rate(const Regime&, double, const PopulationState&, const EventType& ev) const override {
      return ev.kind == EventKind::Death ? -1.0 : 0.0;
    }
    double birth_bound(const Regime&, double, int, std::int64_t) const override { return 0.0; }
    double sup_by_size(const Regime&, double, const EventType&, std::int64_t) const override {
      return 1.0;
    }
    GrowthClass growth_class() const override { return GrowthClass::Affine; }
  } broken;
  const EventSpace space(1);
  Regime regime;
  CHECK_THROWS_AS(evaluate(broken, space, regime, 0.0, {1}), ModelViolationError);
}

TEST_CASE("feller diagnostic partial sums") {
  std::vector<std::function<double(std::int64_t)>> linear{
      [](std::int64_t z) { return static_cast<double>(z); }};
  CHECK(feller_diagnostic(linear, 10) == doctest::Approx(2.9289682539682538));

  std::vector<std::function<double(std::int64_t)>> quadratic{
      [](std::int64_t z) { return static_cast<double>(z) * static_cast<double>(z); }};
  const double pi_sq_over_6 = 1.6449340668482264;
  CHECK(feller_diagnostic(quadratic, 100000) < pi_sq_over_6);

  std::vector<std::function<double(std::int64_t)>> constant{[](std::int64_t) { return 1.0; }};
  CHECK(feller_diagnostic(constant, 25) == doctest::Approx(25.0));

  std::vector<std::function<double(std::int64_t)>> zero{[](std::int64_t) { return 0.0; }};
  CHECK_THROWS_AS(feller_diagnostic(zero, 5), ModelViolationError);
}
