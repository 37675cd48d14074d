#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stratband/errors.hpp"
#include "stratband/rng.hpp"

namespace stratband {

enum class PolicyKind { Ucb, EpsGreedy };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Ucb;
  // UCB tie handling. Lowest-id is the default; randomized ties draw a
  // per-(round, arm) priority. Epsilon-greedy exploitation ties are always
  // randomized; this flag does not affect them.
  bool randomized_ties = false;
  double c = 32.0;  // epsilon schedule constant
  std::optional<double> eps_override;  // tests pin epsilon directly
};

// Principal-side view of one run: pull counts and empirical means of
// delivered rewards. Raw rewards are invisible at this layer.
struct PolicyState {
  std::int64_t horizon = 0;
  std::int64_t t = 0;  // rounds played
  std::vector<std::int64_t> pulls;
  std::vector<double> sums;  // of delivered rewards
  std::vector<bool> blocked;
  int blocked_count = 0;
  double two_ln_horizon = 0.0;

  void init(int k, std::int64_t horizon);
  int k() const { return static_cast<int>(pulls.size()); }
  double mean_hat(int arm) const { return sums[arm] / static_cast<double>(pulls[arm]); }
  void observe(int arm, double delivered) {
    pulls[arm] += 1;
    sums[arm] += delivered;
    t += 1;
  }
};

double ucb_index(double mean_hat, std::int64_t pulls, std::int64_t horizon);

double eps_schedule(std::int64_t horizon, int k, double c = 32.0);

// Selection for round state.t + 1. Every unblocked arm is pulled once, in id
// order, before any index- or mean-based choice. Randomness is addressed by
// round so coupled runs share it.
int ucb_select(const PolicyState& state, const PolicyConfig& cfg,
               std::uint64_t seed);
int eps_greedy_select(const PolicyState& state, const PolicyConfig& cfg,
                      std::uint64_t seed);
int policy_select(const PolicyState& state, const PolicyConfig& cfg,
                  std::uint64_t seed);

void block(PolicyState& state, int arm);

// Arms whose empirical means tie with the maximum, up to accumulated
// floating-point noise.
inline constexpr double mean_tie_tolerance = 1e-9;

}  // namespace stratband
