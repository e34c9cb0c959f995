#include <doctest.h>

#include "bds/environment.hpp"

using namespace bds;

namespace {

Regime tagged(const std::string& id) {
  Regime regime;
  regime.id = id;
  return regime;
}

}  // namespace

TEST_CASE("regimes are right-continuous, intensities read the pre-switch value") {
  EnvironmentPath env({0.0, 1.0, 2.5}, {0, 1, 2},
                      {tagged("a"), tagged("b"), tagged("c")});

  CHECK(env.regime_at(0.0).id == "a");
  CHECK(env.regime_at(0.99).id == "a");
  CHECK(env.regime_at(1.0).id == "b");  // value on [t_m, t_{m+1})
  CHECK(env.regime_at(2.5).id == "c");
  CHECK(env.regime_at(9.0).id == "c");

  // Predictability: the regime in force just before t.
  CHECK(env.regime_before(0.0).id == "a");
  CHECK(env.regime_before(1.0).id == "a");  // left limit at the switch
  CHECK(env.regime_before(1.5).id == "b");
  CHECK(env.regime_before(2.5).id == "b");
  CHECK(env.regime_before(3.0).id == "c");
}

TEST_CASE("environment constructor validates its inputs") {
  CHECK_THROWS(EnvironmentPath({1.0}, {0}, {tagged("a")}));          // must start at 0
  CHECK_THROWS(EnvironmentPath({0.0, 1.0}, {0}, {tagged("a")}));     // one regime per segment
  CHECK_THROWS(EnvironmentPath({0.0, 2.0, 1.0}, {0, 0, 0}, {tagged("a")}));  // ordering
  CHECK_THROWS(EnvironmentPath({0.0}, {3}, {tagged("a")}));          // index out of range
}

TEST_CASE("markov switcher is deterministic per (seed, replicate) and respects the generator") {
  const std::vector<std::vector<double>> generator{{0.0, 2.0}, {3.0, 0.0}};
  RandomSource source(555);
  const auto a = EnvironmentPath::markov_switching(generator, {tagged("a"), tagged("b")}, 0,
                                                   50.0, source, 4);
  const auto b = EnvironmentPath::markov_switching(generator, {tagged("a"), tagged("b")}, 0,
                                                   50.0, source, 4);
  REQUIRE(a.segment_count() == b.segment_count());
  for (std::size_t m = 0; m < a.segment_count(); ++m) {
    CHECK(a.switch_time(m) == b.switch_time(m));
    CHECK(a.regime_index_of_segment(m) == b.regime_index_of_segment(m));
  }

  // Alternating two-state chain: regimes alternate a, b, a, b...
  for (std::size_t m = 0; m + 1 < a.segment_count(); ++m)
    CHECK(a.regime_index_of_segment(m) != a.regime_index_of_segment(m + 1));

  // Mean holding times follow the exit rates (2 out of state a, 3 out of b).
  double time_in_a = 0.0, time_in_b = 0.0;
  int visits_a = 0, visits_b = 0;
  for (std::size_t m = 0; m + 1 < a.segment_count(); ++m) {
    const double hold = a.switch_time(m + 1) - a.switch_time(m);
    if (a.regime_index_of_segment(m) == 0) {
      time_in_a += hold;
      ++visits_a;
    } else {
      time_in_b += hold;
      ++visits_b;
    }
  }
  if (visits_a >= 20) CHECK(time_in_a / visits_a == doctest::Approx(0.5).epsilon(0.5));
  if (visits_b >= 20) CHECK(time_in_b / visits_b == doctest::Approx(1.0 / 3.0).epsilon(0.5));
}

TEST_CASE("absorbing markov states stop the switch sequence") {
  const std::vector<std::vector<double>> generator{{0.0, 1.0}, {0.0, 0.0}};
  RandomSource source(556);
  const auto env = EnvironmentPath::markov_switching(generator, {tagged("a"), tagged("b")}, 1,
                                                     100.0, source, 0);
  CHECK(env.segment_count() == 1);
  CHECK(env.regime_at(50.0).id == "b");
}
