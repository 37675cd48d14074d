#include "stratband/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "stratband/serialize.hpp"

namespace stratband {

std::int64_t sp_pi_reserved_rounds(int k, std::int64_t horizon, double rho) {
  const double ceil_ln = std::ceil(std::log(static_cast<double>(horizon)));
  const double per_arm = std::pow(ceil_ln, rho + 3.0);
  return static_cast<std::int64_t>(
      std::ceil(static_cast<double>(k) * per_arm - 1e-9));
}

void validate_sp_pi(const Instance& inst, const SpPiConfig& cfg) {
  if (cfg.rho <= 0.0)
    fail(Err::ConfigRejected, "mechanism.rho must be positive");
  const std::int64_t reserved =
      sp_pi_reserved_rounds(inst.k(), inst.horizon, cfg.rho);
  // Bidding + reward phases plus one inner sweep must leave room.
  if (inst.horizon <= reserved + 2 * inst.k())
    fail(Err::ConfigRejected,
         "horizon " + std::to_string(inst.horizon) +
             " leaves no inner phase after " + std::to_string(reserved) +
             " reserved reward rounds and " + std::to_string(2 * inst.k()) +
             " bidding/sweep rounds; raise the horizon or lower rho");
}

double second_highest(const std::vector<double>& bids) {
  if (bids.size() < 2)
    fail(Err::TooFewBids, "second_highest needs at least 2 bids, got " +
                              std::to_string(bids.size()));
  std::vector<double> sorted = bids;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[1];
}

bool blocking_rule(double bid, double m_prime, double delivered) {
  return bid <= m_prime + effort_tolerance &&
         delivered > m_prime + effort_tolerance;
}

bool blocking_check(const AuctionState& state, int arm, double delivered) {
  return blocking_rule(state.bids[arm], state.m_prime, delivered);
}

std::int64_t reward_phase_rounds(double mean_pi, std::int64_t horizon,
                                 double rho, rng::Stream& coin) {
  const double x =
      mean_pi * std::pow(std::log(static_cast<double>(horizon)), rho + 3.0);
  const double whole = std::floor(x);
  const double frac = x - whole;
  std::int64_t rounds = static_cast<std::int64_t>(whole);
  if (frac > 0.0 && coin.u01() < frac) rounds += 1;
  return rounds;
}

}  // namespace stratband
