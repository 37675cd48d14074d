#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "stratband/mechanism.hpp"
#include "stratband/serialize.hpp"

using namespace stratband;
using testutil::discrete_arm_doc;
using testutil::error_code;
using testutil::instance_doc;

namespace {

Instance auction_instance(std::int64_t horizon) {
  return build_instance(instance_doc(
      horizon,
      {discrete_arm_doc(0.1, 1.0, false, {{0.1, 1.0}}),
       discrete_arm_doc(0.1, 0.8, true, {{0.1, 1.0}})},
      7));
}

Profile equilibrium_profile(int k) {
  Profile p;
  for (int i = 0; i < k; ++i)
    p.push_back(make_strategy({{"name", "sp_pi_equilibrium"}}));
  return p;
}

}  // namespace

TEST_SUITE("mechanism") {

TEST_CASE("reserved rounds freeze the ceil-log arithmetic") {
  CHECK(sp_pi_reserved_rounds(3, 100000, 1.0) == 62208);
  // ceil(ln 50000) = 11, 11^4 = 14641, two arms
  CHECK(sp_pi_reserved_rounds(2, 50000, 1.0) == 29282);
  // rho = 2 raises the exponent to 5
  CHECK(sp_pi_reserved_rounds(2, 50000, 2.0) == 2 * 161051);
}

TEST_CASE("horizons that cannot fit the phases are rejected") {
  SpPiConfig cfg;
  cfg.rho = 1.0;
  CHECK(error_code([&] { validate_sp_pi(auction_instance(29286), cfg); }) ==
        Err::ConfigRejected);
  CHECK_NOTHROW(validate_sp_pi(auction_instance(29287), cfg));

  SpPiConfig flat;
  flat.rho = 0.0;
  CHECK(error_code([&] { validate_sp_pi(auction_instance(50000), flat); }) ==
        Err::ConfigRejected);
}

TEST_CASE("second_highest drops exactly one copy of the maximum") {
  CHECK(second_highest({1.0, 0.8, 0.3}) == 0.8);
  CHECK(second_highest({0.1, 0.8, 0.3}) == 0.3);
  CHECK(second_highest({0.5, 0.5}) == 0.5);
  CHECK(second_highest({0.2, 0.9, 0.9}) == 0.9);
  CHECK(error_code([] { second_highest({0.7}); }) == Err::TooFewBids);
}

TEST_CASE("the blocking rule fires on underbid overdelivery only") {
  CHECK(blocking_rule(0.3, 0.3, 0.4));
  CHECK(blocking_rule(0.1, 0.3, 0.5));
  CHECK_FALSE(blocking_rule(1.0, 0.8, 0.89));   // bid above m'
  CHECK_FALSE(blocking_rule(0.3, 0.3, 0.3));    // delivered at m'
  CHECK_FALSE(blocking_rule(0.3, 0.3, 0.3 + 0.5e-12));  // within tolerance
  CHECK(blocking_rule(0.3, 0.3, 0.3 + 1e-10));
}

TEST_CASE("reward rounds use floor-plus-bernoulli rounding") {
  rng::Stream coin{3, rng::mechanism_stream, 0};
  CHECK(reward_phase_rounds(0.0, 100000, 1.0, coin) == 0);
  CHECK(coin.cursor == 0);  // zero mass consumes no randomness

  const double target = 0.5 * std::pow(std::log(100000.0), 4.0);
  const std::int64_t lo = static_cast<std::int64_t>(std::floor(target));
  double sum = 0.0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    rng::Stream c{static_cast<std::uint64_t>(i), rng::mechanism_stream, 0};
    std::int64_t r = reward_phase_rounds(0.5, 100000, 1.0, c);
    REQUIRE((r == lo || r == lo + 1));
    sum += static_cast<double>(r);
  }
  CHECK(sum / trials == doctest::Approx(target).epsilon(0.001));
}

TEST_CASE("an equilibrium auction accounts for every round") {
  Instance inst = auction_instance(50000);
  SpPiConfig cfg;
  EpisodeOptions opt;
  opt.record_rounds = true;
  EpisodeOutcome out = run_sp_pi(inst, equilibrium_profile(2), cfg, 7, opt);

  CHECK(out.pulls[0] + out.pulls[1] == 50000);
  CHECK(out.phase_marks.bidding_start == 1);
  CHECK(out.phase_marks.pi_start == 3);
  CHECK(out.phase_marks.reward_start > 3);
  CHECK(out.blocked == std::vector<bool>{false, false});
  REQUIRE(out.round_log.size() == 50000);

  // Phases appear in order and partition the log.
  CHECK(out.round_log[0].phase == Phase::Bid);
  CHECK(out.round_log[1].phase == Phase::Bid);
  std::int64_t reward_rounds = 0;
  double revenue = 0.0;
  for (const auto& row : out.round_log) {
    revenue += row.delivered;
    if (row.round >= out.phase_marks.reward_start) {
      CHECK(row.phase == Phase::Reward);
      ++reward_rounds;
    } else if (row.round >= 3) {
      CHECK(row.phase == Phase::Pi);
    }
    CHECK_FALSE(row.blocked);
  }
  CHECK(revenue == doctest::Approx(out.revenue).epsilon(1e-9));

  // Truthful bids: the capped arm is announced as m' and both arms play
  // deterministic targets in the inner phase.
  const double bar = 0.8 + 1.0 / std::log(50000.0);
  for (const auto& row : out.round_log) {
    if (row.phase != Phase::Pi) continue;
    if (row.arm == 0) CHECK(row.delivered == doctest::Approx(bar).epsilon(1e-9));
    if (row.arm == 1) CHECK(row.delivered == doctest::Approx(0.8).epsilon(1e-9));
  }

  // Reward-phase lengths follow the inner means within the rounding step.
  const double weight = std::pow(std::log(50000.0), 4.0);
  std::int64_t reward0 = 0;
  std::int64_t reward1 = 0;
  for (const auto& row : out.round_log)
    if (row.phase == Phase::Reward) (row.arm == 0 ? reward0 : reward1) += 1;
  CHECK(reward0 + reward1 == reward_rounds);
  CHECK(std::abs(static_cast<double>(reward0) - bar * weight) <= 1.0);
  CHECK(std::abs(static_cast<double>(reward1) - 0.8 * weight) <= 1.0);
}

TEST_CASE("the same seed replays the same auction") {
  Instance inst = auction_instance(50000);
  SpPiConfig cfg;
  EpisodeOutcome a = run_sp_pi(inst, equilibrium_profile(2), cfg, 7);
  EpisodeOutcome b = run_sp_pi(inst, equilibrium_profile(2), cfg, 7);
  CHECK(outcome_to_json(a).dump() == outcome_to_json(b).dump());
}

TEST_CASE("underbidding then overdelivering gets an arm frozen") {
  Instance inst = auction_instance(50000);
  Profile p;
  p.push_back(make_strategy(
      {{"name", "sp_pi_fixed_play"}, {"bid", 0.1}, {"level", 0.5}}));
  p.push_back(make_strategy({{"name", "sp_pi_equilibrium"}}));
  EpisodeOptions opt;
  opt.record_rounds = true;
  EpisodeOutcome out = run_sp_pi(inst, p, SpPiConfig{}, 7, opt);

  CHECK(out.blocked == std::vector<bool>{true, false});

  // Bids are (0.1, 0.8), so m' = 0.1. The deviator's first inner pull
  // delivers 0.5 > m' and trips the rule; every later inner pull is the
  // rival's.
  std::int64_t deviator_pi_pulls = 0;
  bool saw_blocked_reward_row = false;
  std::int64_t deviator_reward = 0;
  for (const auto& row : out.round_log) {
    if (row.arm != 0) continue;
    if (row.phase == Phase::Pi) ++deviator_pi_pulls;
    if (row.phase == Phase::Reward) {
      ++deviator_reward;
      CHECK(row.blocked);
      CHECK(row.delivered == 0.0);  // absorbs its raw in the reward phase
      saw_blocked_reward_row = true;
    }
  }
  CHECK(deviator_pi_pulls == 1);
  CHECK(saw_blocked_reward_row);

  // Blocked arms are still paid: mu_pi = 0.5 from the single pull.
  const double weight = std::pow(std::log(50000.0), 4.0);
  CHECK(std::abs(static_cast<double>(deviator_reward) - 0.5 * weight) <= 1.0);
}

TEST_CASE("disabling the blocking rule lets the deviation run") {
  Instance inst = auction_instance(50000);
  Profile p;
  p.push_back(make_strategy(
      {{"name", "sp_pi_fixed_play"}, {"bid", 0.1}, {"level", 0.5}}));
  p.push_back(make_strategy({{"name", "sp_pi_equilibrium"}}));
  SpPiConfig cfg;
  cfg.blocking = false;
  EpisodeOutcome out = run_sp_pi(inst, p, cfg, 7);
  CHECK(out.blocked == std::vector<bool>{false, false});
  // Delivering 0.5 against a rival playing near 0.19 wins the inner phase.
  CHECK(out.pulls[0] > out.pulls[1]);
}

}  // TEST_SUITE
