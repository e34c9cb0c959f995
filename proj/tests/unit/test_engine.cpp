#include <doctest.h>

#include <cmath>

#include "bds/engine.hpp"
#include "bds/stats.hpp"
#include "bds/toy.hpp"

using namespace bds;

namespace {

Regime linear_regime(std::vector<double> death, std::vector<double> birth,
                     std::vector<double> immigration, std::vector<double> swaps) {
  Regime regime;
  regime.death = std::move(death);
  regime.birth = std::move(birth);
  regime.immigration = std::move(immigration);
  regime.swap_coeff = std::move(swaps);
  return regime;
}

// Pure immigration: constant birth rates, nothing else. The model's rate
// equals its own dominator, so thinning accepts every record.
Regime immigration_only(double r1, double r2) {
  return linear_regime({0.0, 0.0}, {0.0, 0.0}, {r1, r2}, {0.0, 0.0, 0.0, 0.0});
}

Regime zero_regime() { return linear_regime({0, 0}, {0, 0}, {0, 0}, {0, 0, 0, 0}); }

const ToyParams kToy{1.0, 2.0, 0.2, 0.1, 1.0, 1.0};

}  // namespace

TEST_CASE("horizon zero gives an empty skeleton") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(1);
  const auto skeleton = simulate_dominating(*toy, env, {1, 1}, 0.0, source);
  CHECK(skeleton.records.empty());
}

TEST_CASE("empty population with no immigration stays silent") {
  auto toy = make_toy_model();
  const ToyParams params{1.0, 2.0, 0.5, 0.0, 1.0, 1.0};  // g(0) = 0
  auto env = EnvironmentPath::constant(params.to_regime());
  RandomSource source(2);
  const auto skeleton = simulate_dominating(*toy, env, {0, 0}, 10.0, source);
  CHECK(skeleton.records.empty());
}

TEST_CASE("skeleton records carry valid marks and strictly increasing times") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(3);
  const auto skeleton = simulate_dominating(*toy, env, {2, 1}, 5.0, source);
  REQUIRE(!skeleton.records.empty());
  double prev = -1.0;
  for (const auto& rec : skeleton.records) {
    CHECK(rec.time > prev);
    CHECK(rec.mark > 0.0);
    CHECK(rec.mark <= rec.rate);
    prev = rec.time;
  }
}

TEST_CASE("dominating components are Poisson when the birth dominator vanishes") {
  // With no births the death/swap dominators are frozen at the initial size:
  // death_i at d_i * 2, swap(1->2) at k12 * 4, swap(2->1) at k21 * 2.
  auto toy = make_toy_model();
  const ToyParams params{1.0, 2.0, 0.0, 0.0, 1.0, 1.0};
  auto env = EnvironmentPath::constant(params.to_regime());
  RandomSource source(4);
  const double horizon = 2.0;
  const int replicates = 10000;
  const EventSpace space(2);

  std::vector<double> mean(static_cast<std::size_t>(space.size()), 0.0);
  for (int rep = 0; rep < replicates; ++rep) {
    const auto skeleton =
        simulate_dominating(*toy, env, {1, 1}, horizon, source, static_cast<std::uint64_t>(rep));
    for (const auto& rec : skeleton.records)
      mean[static_cast<std::size_t>(space.index(rec.event))] += 1.0;
  }
  for (auto& m : mean) m /= replicates;

  const auto expect = [&](const EventType& ev, double rate) {
    const double target = rate * horizon;
    const double se = std::sqrt(target / replicates);
    CHECK(std::abs(mean[static_cast<std::size_t>(space.index(ev))] - target) <= 3.0 * se);
  };
  expect(EventType::death(0), 2.0);
  expect(EventType::death(1), 4.0);
  expect(EventType::swap(0, 1), 4.0);
  expect(EventType::swap(1, 0), 2.0);
  expect(EventType::birth(0), 0.0);
  expect(EventType::birth(1), 0.0);
}

TEST_CASE("thinning accepts everything when the rate equals the dominator") {
  auto linear = make_linear_model(2);
  auto env = EnvironmentPath::constant(immigration_only(3.0, 1.0));
  RandomSource source(5);
  const auto run = simulate_bds(*linear, env, {0, 0}, 4.0, source);
  CHECK(run.path.events.size() == run.skeleton.records.size());
  const auto check = check_strong_domination(run.path, run.skeleton);
  CHECK(check.dominated);
}

TEST_CASE("domination check is directional") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(22);
  const auto run = simulate_bds(*toy, env, {1, 1}, 5.0, source);
  CHECK(check_strong_domination(run.path, run.skeleton).dominated);
  CHECK(check_strong_domination(run.skeleton, run.skeleton).dominated);

  // Whenever thinning rejected anything, the skeleton is not dominated by
  // the path, and the first extra record is reported.
  if (run.path.events.size() < run.skeleton.records.size()) {
    const auto reverse = check_strong_domination(run.skeleton, run.path);
    CHECK(!reverse.dominated);
    CHECK(reverse.first_violation.has_value());
  }

  // Two unrelated paths are not mutually dominated.
  const auto other = simulate_bds(*toy, env, {1, 1}, 5.0, source, 1);
  REQUIRE(!other.path.events.empty());
  CHECK(!check_strong_domination(other.path, run.path).dominated);
}

TEST_CASE("a zero intensity accepts nothing") {
  auto toy = make_toy_model();
  auto zero = make_linear_model(2);
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(6);
  const auto skeleton = simulate_dominating(*toy, env, {1, 1}, 5.0, source);
  REQUIRE(!skeleton.records.empty());

  // Re-thin the toy skeleton with an all-zero model under the same regime.
  auto env_zero = EnvironmentPath::constant(zero_regime());
  const auto path = thin_to_bds(skeleton, *zero, env_zero, {1, 1});
  CHECK(path.events.empty());
}

TEST_CASE("pathwise invariants hold on every replicate") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(7);
  EngineOptions options;
  options.verify = true;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto run =
        simulate_bds(*toy, env, {1, 1}, 5.0, source, static_cast<std::uint64_t>(rep), options);
    CHECK(check_strong_domination(run.path, run.skeleton).dominated);
    CHECK(check_support_condition(run.path));
    CHECK(check_aggregate_bound(run.path, run.skeleton));

    // Aggregate bookkeeping: Z_total = Z0_total + births - deaths, at event
    // times and at the end.
    for (double t : {1.3, 2.5, 5.0}) {
      const auto z = run.path.state_at(t);
      CHECK(aggregate(z) == 2 + run.path.birth_count_at(t) - run.path.death_count_at(t));
    }
  }
}

TEST_CASE("identical seeds reproduce identical runs") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(8);
  const auto a = simulate_bds(*toy, env, {1, 1}, 5.0, source, 42);
  const auto b = simulate_bds(*toy, env, {1, 1}, 5.0, source, 42);
  REQUIRE(a.skeleton.records.size() == b.skeleton.records.size());
  for (std::size_t k = 0; k < a.skeleton.records.size(); ++k) {
    CHECK(a.skeleton.records[k].time == b.skeleton.records[k].time);
    CHECK(a.skeleton.records[k].mark == b.skeleton.records[k].mark);
  }
  REQUIRE(a.path.events.size() == b.path.events.size());
  for (std::size_t k = 0; k < a.path.events.size(); ++k)
    CHECK(a.path.events[k] == b.path.events[k]);
}

TEST_CASE("rates refresh at regime switches") {
  auto linear = make_linear_model(2);
  std::vector<Regime> table{immigration_only(5.0, 0.0), immigration_only(0.0, 0.0)};
  EnvironmentPath env({0.0, 1.0}, {0, 1}, table);
  RandomSource source(9);
  const auto run = simulate_bds(*linear, env, {0, 0}, 2.0, source);
  for (const auto& ev : run.path.events) CHECK(ev.time <= 1.0);

  const auto residuals = compensator_residual(run.path, *linear, env, {2.0});
  const EventSpace space(2);
  const auto idx = static_cast<std::size_t>(space.index(EventType::birth(0)));
  const double n_t = static_cast<double>(run.path.birth_count_at(2.0));
  CHECK(residuals.residuals[0][idx] == doctest::Approx(n_t - 5.0));
}

TEST_CASE("explosion guard raises with partial data") {
  auto linear = make_linear_model(2);
  auto env = EnvironmentPath::constant(immigration_only(1000.0, 1000.0));
  RandomSource source(10);
  EngineOptions options;
  options.max_records = 50;
  CHECK_THROWS_AS(simulate_dominating(*linear, env, {0, 0}, 100.0, source, 0, options),
                  ExplosionError);
  try {
    simulate_dominating(*linear, env, {0, 0}, 100.0, source, 0, options);
  } catch (const ExplosionError& error) {
    CHECK(error.partial.records.size() >= 50);
  }
}

TEST_CASE("tampered marks are rejected") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(11);
  auto skeleton = simulate_dominating(*toy, env, {1, 1}, 5.0, source);
  REQUIRE(!skeleton.records.empty());
  skeleton.records.front().mark = skeleton.records.front().rate * 2.0;
  CHECK_THROWS_AS(thin_to_bds(skeleton, *toy, env, {1, 1}), CorruptedSkeletonError);
}

TEST_CASE("coupling identical models yields identical paths") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(12);
  EngineOptions options;
  options.verify = true;
  const auto pair = coupled_pair(*toy, *toy, env, {1, 1}, 4.0, source, 0, options);
  REQUIRE(pair.low.events.size() == pair.high.events.size());
  for (std::size_t k = 0; k < pair.low.events.size(); ++k)
    CHECK(pair.low.events[k] == pair.high.events[k]);
}

TEST_CASE("coupling a zero model yields an empty low path") {
  auto toy = make_toy_model();
  auto zero = make_linear_model(2);
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(13);

  // The zero model reads the same regime but every coefficient it uses is 0.
  struct ZeroView final : IntensityModel {
    std::string name() const override { return "zero"; }
    int subgroups() const override { return 2; }
    double rate(const Regime&, double, const PopulationState&, const EventType&) const override {
      return 0.0;
    }
    double birth_bound(const Regime&, double, int, std::int64_t) const override { return 0.0; }
    double sup_by_size(const Regime&, double, const EventType&, std::int64_t) const override {
      return 0.0;
    }
    GrowthClass growth_class() const override { return GrowthClass::Affine; }
  } zero_model;

  EngineOptions options;
  options.verify = true;
  const auto pair = coupled_pair(zero_model, *toy, env, {1, 1}, 4.0, source, 0, options);
  CHECK(pair.low.events.empty());
  CHECK(!pair.high.events.empty());
}

TEST_CASE("immigration-ordered toy pair satisfies the jump-subset relation") {
  auto toy = make_toy_model();
  const ToyParams low{1.0, 2.0, 0.2, 0.1, 1.0, 1.0};
  const ToyParams high{1.0, 2.0, 0.2, 0.5, 1.0, 1.0};

  // Two views of the same model with immigration pinned to each level; the
  // environment carries the shared parameters.
  struct Pinned final : IntensityModel {
    Pinned(std::shared_ptr<IntensityModel> base, Regime regime)
        : base_(std::move(base)), regime_(std::move(regime)) {}
    std::string name() const override { return base_->name(); }
    int subgroups() const override { return base_->subgroups(); }
    double rate(const Regime&, double t, const PopulationState& z,
                const EventType& ev) const override {
      return base_->rate(regime_, t, z, ev);
    }
    double birth_bound(const Regime&, double t, int j, std::int64_t n) const override {
      return base_->birth_bound(regime_, t, j, n);
    }
    double sup_by_size(const Regime&, double t, const EventType& ev,
                       std::int64_t n) const override {
      return base_->sup_by_size(regime_, t, ev, n);
    }
    GrowthClass growth_class() const override { return base_->growth_class(); }
    std::shared_ptr<IntensityModel> base_;
    Regime regime_;
  };

  Pinned model_low(toy, low.to_regime());
  Pinned model_high(toy, high.to_regime());
  auto env = EnvironmentPath::constant(high.to_regime());
  RandomSource source(14);
  EngineOptions options;
  options.verify = true;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto pair = coupled_pair(model_low, model_high, env, {1, 1}, 3.0, source,
                                   static_cast<std::uint64_t>(rep), options);
    CHECK(check_strong_domination(pair.low, pair.high).dominated);
    CHECK(check_strong_domination(pair.high, pair.skeleton).dominated);
  }
}

TEST_CASE("strong-order verification refuses a reversed pair") {
  auto toy = make_toy_model();
  const ToyParams smaller{1.0, 2.0, 0.2, 0.1, 1.0, 1.0};
  auto env = EnvironmentPath::constant(kToy.to_regime());  // lambda = 0.1 < 0.5

  struct MoreImmigration final : IntensityModel {
    explicit MoreImmigration(std::shared_ptr<IntensityModel> base) : base_(std::move(base)) {}
    std::string name() const override { return "toy+immigration"; }
    int subgroups() const override { return 2; }
    double rate(const Regime& regime, double t, const PopulationState& z,
                const EventType& ev) const override {
      const double extra = ev.kind == EventKind::Birth ? 0.4 : 0.0;
      return base_->rate(regime, t, z, ev) + extra;
    }
    double birth_bound(const Regime& regime, double t, int j, std::int64_t n) const override {
      return base_->birth_bound(regime, t, j, n) + 0.4;
    }
    double sup_by_size(const Regime& regime, double t, const EventType& ev,
                       std::int64_t n) const override {
      return base_->sup_by_size(regime, t, ev, n);
    }
    GrowthClass growth_class() const override { return GrowthClass::Affine; }
    std::shared_ptr<IntensityModel> base_;
  } bigger(toy);

  RandomSource source(15);
  EngineOptions options;
  options.verify = true;
  CHECK_THROWS_AS(coupled_pair(bigger, *toy, env, {1, 1}, 2.0, source, 0, options),
                  StrongOrderViolationError);
  (void)smaller;
}

TEST_CASE("reconstruction of a path from itself is the identity") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(16);
  const auto run = simulate_bds(*toy, env, {1, 1}, 4.0, source);
  const auto eval = make_intensity_evaluator(*toy, env);
  const auto rebuilt = reconstruct_by_ratio(run.path, run.path, eval, eval, source, 0);
  CHECK(rebuilt.events == run.path.events);
}

TEST_CASE("reconstruction of an empty dominated path is empty") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(17);
  const auto run = simulate_bds(*toy, env, {1, 1}, 4.0, source);

  BdsPath empty;
  empty.initial_state = {1, 1};
  empty.horizon = run.path.horizon;
  const auto zero_eval = [](double, const PopulationState&, const EventType&) { return 0.0; };
  const auto eval = make_intensity_evaluator(*toy, env);
  const auto rebuilt = reconstruct_by_ratio(empty, run.path, zero_eval, eval, source, 0);
  CHECK(rebuilt.events.empty());
}

TEST_CASE("reconstruction precondition rejects non-dominated inputs") {
  auto toy = make_toy_model();
  auto env = EnvironmentPath::constant(kToy.to_regime());
  RandomSource source(18);
  const auto a = simulate_bds(*toy, env, {1, 1}, 4.0, source, 0);
  const auto b = simulate_bds(*toy, env, {1, 1}, 4.0, source, 1);
  REQUIRE(!a.path.events.empty());
  const auto eval = make_intensity_evaluator(*toy, env);
  CHECK_THROWS_AS(reconstruct_by_ratio(a.path, b.path, eval, eval, source, 0),
                  DominationPreconditionError);
}

TEST_CASE("compensator residual of a zero-rate path is zero") {
  auto zero = make_linear_model(2);
  auto env = EnvironmentPath::constant(zero_regime());
  BdsPath path;
  path.initial_state = {3, 2};
  path.horizon = 5.0;
  const auto residuals = compensator_residual(path, *zero, env, {1.0, 2.5, 5.0});
  for (const auto& at_checkpoint : residuals.residuals)
    for (double r : at_checkpoint) CHECK(r == 0.0);
}

TEST_CASE("compensator residual is exact for a homogeneous Poisson component") {
  auto linear = make_linear_model(2);
  auto env = EnvironmentPath::constant(immigration_only(4.0, 0.0));
  RandomSource source(19);
  const EventSpace space(2);
  const auto idx = static_cast<std::size_t>(space.index(EventType::birth(0)));

  const auto run = simulate_bds(*linear, env, {0, 0}, 2.0, source);
  const auto residuals = compensator_residual(run.path, *linear, env, {0.5, 1.0, 2.0});
  for (std::size_t c = 0; c < residuals.checkpoints.size(); ++c) {
    const double t = residuals.checkpoints[c];
    const double expected = static_cast<double>(run.path.birth_count_at(t)) - 4.0 * t;
    CHECK(residuals.residuals[c][idx] == doctest::Approx(expected));
  }

  CHECK_THROWS_AS(compensator_residual(run.path, *linear, env, {3.0}), std::invalid_argument);
}

TEST_CASE("pathwise invariants hold under a switching environment") {
  auto toy = make_toy_model();
  const ToyParams calm{0.5, 1.0, 0.2, 0.1, 1.0, 1.0};
  const ToyParams harsh{1.0, 3.0, 0.1, 0.3, 2.0, 0.5};
  const std::vector<std::vector<double>> generator{{0.0, 1.5}, {1.0, 0.0}};
  RandomSource source(23);
  EngineOptions options;
  options.verify = true;
  for (int rep = 0; rep < 500; ++rep) {
    const auto env = EnvironmentPath::markov_switching(
        generator, {calm.to_regime(), harsh.to_regime()}, 0, 4.0, source,
        static_cast<std::uint64_t>(rep));
    const auto run =
        simulate_bds(*toy, env, {1, 1}, 4.0, source, static_cast<std::uint64_t>(rep), options);
    CHECK(check_strong_domination(run.path, run.skeleton).dominated);
    CHECK(check_support_condition(run.path));
    CHECK(check_aggregate_bound(run.path, run.skeleton));
  }
}

TEST_CASE("uncertified growth classes need an explicit assertion") {
  struct WildGrowth final : IntensityModel {
    std::string name() const override { return "wild"; }
    int subgroups() const override { return 1; }
    double rate(const Regime&, double, const PopulationState& z, const EventType& ev) const override {
      return ev.kind == EventKind::Birth ? 0.5 * static_cast<double>(z[0]) : 0.0;
    }
    double birth_bound(const Regime&, double, int, std::int64_t n) const override {
      return 0.5 * static_cast<double>(n);
    }
    double sup_by_size(const Regime&, double, const EventType&, std::int64_t) const override {
      return 0.0;
    }
    GrowthClass growth_class() const override { return GrowthClass::UserAsserted; }
  } model;

  Regime regime;
  auto env = EnvironmentPath::constant(regime);
  RandomSource source(21);
  CHECK_THROWS_AS(simulate_dominating(model, env, {1}, 1.0, source), ModelViolationError);

  EngineOptions options;
  options.user_asserts_feller = true;
  CHECK_NOTHROW(simulate_dominating(model, env, {1}, 1.0, source, 0, options));
}

TEST_CASE("compensator residual means vanish across replicates") {
  auto linear = make_linear_model(2);
  auto env = EnvironmentPath::constant(immigration_only(4.0, 0.0));
  RandomSource source(20);
  const EventSpace space(2);
  const auto idx = static_cast<std::size_t>(space.index(EventType::birth(0)));

  const int replicates = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    const auto run = simulate_bds(*linear, env, {0, 0}, 1.0, source,
                                  static_cast<std::uint64_t>(rep));
    const auto residuals = compensator_residual(run.path, *linear, env, {1.0});
    const double r = residuals.residuals[0][idx];
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / replicates;
  const double sd = std::sqrt((sum_sq - sum * sum / replicates) / (replicates - 1));
  CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(replicates)));
}
