#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "grail/motivation.hpp"
#include "test_oracles.hpp"

using namespace grail;

TEST_CASE("first recorded success sets the EMAs to their rates") {
  CompetenceTracker tracker;
  tracker.record(0, 0, true);
  CHECK(tracker.fast_average(0, 0) == 0.2);
  CHECK(tracker.competence(0, 0) == 0.05);
  CHECK(tracker.intrinsic_reward(0, 0) == doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("constant success stream follows the geometric closed form") {
  CompetenceTracker tracker;
  for (int n = 1; n <= 200; ++n) {
    tracker.record(3, 1, true);
    CHECK(tracker.fast_average(3, 1) ==
          doctest::Approx(1.0 - std::pow(0.8, n)).epsilon(1e-12));
    CHECK(tracker.competence(3, 1) ==
          doctest::Approx(1.0 - std::pow(0.95, n)).epsilon(1e-12));
  }
}

TEST_CASE("alternating outcomes settle into the two-cycle band") {
  CompetenceTracker tracker;
  for (int i = 0; i < 4000; ++i) tracker.record(0, 0, i % 2 == 0);

  // after a 1,0 pair the fast EMA sits at the cycle's low fixed point
  const double lo = oracle::ema_two_cycle_low(0.2);
  const double hi = oracle::ema_two_cycle_high(0.2);
  CHECK(tracker.fast_average(0, 0) == doctest::Approx(lo).epsilon(1e-12));
  tracker.record(0, 0, true);
  CHECK(tracker.fast_average(0, 0) == doctest::Approx(hi).epsilon(1e-12));

  // both averages stay within 0.5 +- alpha/2
  CHECK(std::abs(tracker.fast_average(0, 0) - 0.5) <= 0.2 / 2 + 1e-12);
  CHECK(std::abs(tracker.competence(0, 0) - 0.5) <= 0.05 / 2 + 1e-12);
}

TEST_CASE("intrinsic reward is the clamped EMA difference") {
  CompetenceTracker tracker;
  CHECK(tracker.intrinsic_reward(9, 2) == 0.0);  // fresh entry: plateau at zero

  // one success, then failures: the fast average collapses below the slow one
  tracker.record(9, 2, true);
  for (int i = 0; i < 30; ++i) tracker.record(9, 2, false);
  CHECK(tracker.fast_average(9, 2) < tracker.competence(9, 2));
  CHECK(tracker.intrinsic_reward(9, 2) == 0.0);

  CompetenceTracker raw({.alpha_fast = 0.2, .alpha_slow = 0.05, .clamp_negative = false});
  raw.record(9, 2, true);
  for (int i = 0; i < 30; ++i) raw.record(9, 2, false);
  CHECK(raw.intrinsic_reward(9, 2) < 0.0);
  CHECK(raw.intrinsic_reward(9, 2) ==
        doctest::Approx(raw.fast_average(9, 2) - raw.competence(9, 2)));
}

TEST_CASE("reward over a success streak peaks where the analytic curve does") {
  CompetenceTracker tracker;
  int best_n = 0;
  double best = -1.0;
  for (int n = 1; n <= 60; ++n) {
    tracker.record(0, 0, true);
    const double r = tracker.intrinsic_reward(0, 0);
    CHECK(r == doctest::Approx(std::pow(0.95, n) - std::pow(0.8, n)).epsilon(1e-12));
    if (r > best) {
      best = r;
      best_n = n;
    }
  }

  int analytic_n = 0;
  double analytic_best = -1.0;
  for (int n = 1; n <= 60; ++n) {
    const double r = std::pow(0.95, n) - std::pow(0.8, n);
    if (r > analytic_best) {
      analytic_best = r;
      analytic_n = n;
    }
  }
  CHECK(best_n == analytic_n);
  CHECK(best_n == 9);
}

TEST_CASE("competence approaches one on long streaks") {
  CompetenceTracker tracker;
  for (int i = 0; i < 100; ++i) tracker.record(0, 0, true);
  CHECK(tracker.competence(0, 0) ==
        doctest::Approx(1.0 - std::pow(0.95, 100)).epsilon(1e-12));
  for (int i = 0; i < 2000; ++i) tracker.record(0, 0, true);
  CHECK(tracker.competence(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reward decays to zero once outcomes become constant") {
  RandomStream rng(31);
  CompetenceTracker tracker;
  for (int i = 0; i < 500; ++i) tracker.record(0, 0, rng.bernoulli(0.5));
  for (int i = 0; i < 3000; ++i) tracker.record(0, 0, true);
  CHECK(tracker.intrinsic_reward(0, 0) < 1e-9);
}

TEST_CASE("rewards stay in the unit interval on arbitrary streams") {
  RandomStream rng(32);
  CompetenceTracker tracker;
  for (int i = 0; i < 5000; ++i) {
    tracker.record(0, 0, rng.bernoulli(rng.uniform01()));
    const double r = tracker.intrinsic_reward(0, 0);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("recording is local to its key and goal") {
  CompetenceTracker tracker;
  tracker.record(1, 0, true);
  tracker.record(1, 0, true);
  const double fast = tracker.fast_average(1, 0);

  tracker.record(2, 0, false);
  tracker.record(1, 1, true);
  CHECK(tracker.fast_average(1, 0) == fast);
  CHECK(tracker.fast_average(2, 0) == 0.0);
  CHECK(tracker.fast_average(1, 1) == 0.2);
  CHECK(tracker.size() == 3);
}

TEST_CASE("EMAs match the direct-sum oracle to 1e-12 on a scripted stream") {
  RandomStream rng(33);
  std::vector<double> outcomes;
  CompetenceTracker tracker;
  for (int i = 0; i < 10000; ++i) {
    const bool achieved = rng.bernoulli(0.37);
    outcomes.push_back(achieved ? 1.0 : 0.0);
    tracker.record(0, 0, achieved);
  }
  CHECK(std::abs(tracker.fast_average(0, 0) - oracle::ema_direct(0.2, outcomes)) < 1e-12);
  CHECK(std::abs(tracker.competence(0, 0) - oracle::ema_direct(0.05, outcomes)) < 1e-12);
}

TEST_CASE("tracker dump uses the documented header") {
  CompetenceTracker tracker;
  tracker.record(4, 2, true);
  std::ostringstream out;
  tracker.dump_csv(out);
  CHECK(out.str() == "key,goal,c_fast,c_slow\n4,2,0.2,0.05\n");
}
