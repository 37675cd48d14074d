#pragma once

#include "stratband/core.hpp"
#include "stratband/policies.hpp"
#include "stratband/strategies.hpp"

namespace stratband {

// Auction mechanism: one bidding pull per arm, broadcast of the
// second-highest bid m', a blocking-augmented inner bandit phase with fresh
// statistics, and a closing reward phase whose per-arm length is
// proportional to the arm's inner-phase performance.
struct SpPiConfig {
  double rho = 1.0;  // reward-phase exponent, length ~ (ln n)^(rho+3)
  PolicyConfig inner;
  bool blocking = true;  // disabled only to demonstrate why it is needed
};

struct AuctionState {
  std::vector<double> bids;
  double m_prime = 0.0;
  std::vector<bool> blocked;
  Phase phase = Phase::Bid;
  std::vector<double> mu_pi;  // per-arm empirical mean of the inner phase
};

// Rounds reserved for the reward phase: k * ceil(ln n)^(rho+3).
std::int64_t sp_pi_reserved_rounds(int k, std::int64_t horizon, double rho);

// Rejects configurations whose phase arithmetic cannot fit the horizon.
void validate_sp_pi(const Instance& inst, const SpPiConfig& cfg);

double second_highest(const std::vector<double>& bids);

// An arm is blocked when it bid at or below m' but delivered above it.
bool blocking_rule(double bid, double m_prime, double delivered);
bool blocking_check(const AuctionState& state, int arm, double delivered);

// Floor-plus-Bernoulli rounding of mean_pi * (ln n)^(rho+3), so the
// expectation is exactly the target.
std::int64_t reward_phase_rounds(double mean_pi, std::int64_t horizon,
                                 double rho, rng::Stream& coin);

// Full episode under the mechanism. Implemented alongside the episode
// engine so both execution paths share one pull/accounting loop.
EpisodeOutcome run_sp_pi(const Instance& inst, const Profile& profile,
                         const SpPiConfig& cfg, std::uint64_t seed,
                         const EpisodeOptions& opt = {});

}  // namespace stratband
