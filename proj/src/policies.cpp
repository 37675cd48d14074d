#include "stratband/policies.hpp"

#include <cmath>

namespace stratband {

void PolicyState::init(int arms, std::int64_t n) {
  horizon = n;
  t = 0;
  pulls.assign(arms, 0);
  sums.assign(arms, 0.0);
  blocked.assign(arms, false);
  blocked_count = 0;
  two_ln_horizon = 2.0 * std::log(static_cast<double>(n));
}

double ucb_index(double mean_hat, std::int64_t pulls, std::int64_t horizon) {
  return mean_hat +
         std::sqrt(2.0 * std::log(static_cast<double>(horizon)) /
                   static_cast<double>(pulls));
}

double eps_schedule(std::int64_t horizon, int k, double c) {
  const double n = static_cast<double>(horizon);
  const double raw = c * std::cbrt(static_cast<double>(k) * std::log(n)) /
                     std::cbrt(n);
  return raw < 1.0 ? raw : 1.0;
}

namespace {

// Lowest-id unblocked arm not yet pulled, or -1 when the initial sweep is
// complete. In a plain run this yields arm t-1 in round t for t <= k.
int sweep_arm(const PolicyState& s) {
  for (int i = 0; i < s.k(); ++i)
    if (!s.blocked[i] && s.pulls[i] == 0) return i;
  return -1;
}

void ensure_playable(const PolicyState& s) {
  if (s.blocked_count >= s.k())
    fail(Err::AllArmsBlocked, "every arm is blocked; no selection possible");
}

int tie_winner(const PolicyState& s, const std::vector<int>& tied,
               std::uint64_t seed) {
  // Max of per-(round, arm) iid priorities: uniform over the tied set, and
  // stable across runs that share the tie stream.
  const std::uint64_t round = static_cast<std::uint64_t>(s.t) + 1;
  int best = tied.front();
  double best_priority = -1.0;
  for (int arm : tied) {
    const double p =
        rng::u01(seed, rng::policy_tie_stream, rng::tie_index(round, arm));
    if (p > best_priority) {
      best_priority = p;
      best = arm;
    }
  }
  return best;
}

}  // namespace

int ucb_select(const PolicyState& s, const PolicyConfig& cfg,
               std::uint64_t seed) {
  ensure_playable(s);
  if (int arm = sweep_arm(s); arm >= 0) return arm;
  std::vector<int> tied;
  double best = -1e300;
  for (int i = 0; i < s.k(); ++i) {
    if (s.blocked[i]) continue;
    const double idx =
        s.sums[i] / static_cast<double>(s.pulls[i]) +
        std::sqrt(s.two_ln_horizon / static_cast<double>(s.pulls[i]));
    if (idx > best) {
      best = idx;
      tied.clear();
      tied.push_back(i);
    } else if (idx == best) {
      tied.push_back(i);
    }
  }
  if (tied.size() == 1 || !cfg.randomized_ties) return tied.front();
  return tie_winner(s, tied, seed);
}

int eps_greedy_select(const PolicyState& s, const PolicyConfig& cfg,
                      std::uint64_t seed) {
  ensure_playable(s);
  if (int arm = sweep_arm(s); arm >= 0) return arm;
  const std::uint64_t round = static_cast<std::uint64_t>(s.t) + 1;
  const double eps = cfg.eps_override
                         ? *cfg.eps_override
                         : eps_schedule(s.horizon, s.k(), cfg.c);
  if (rng::u01(seed, rng::policy_coin_stream, round) < eps) {
    // Uniform over unblocked arms.
    const int alive = s.k() - s.blocked_count;
    int pick = static_cast<int>(
        rng::u01(seed, rng::policy_explore_stream, round) * alive);
    if (pick >= alive) pick = alive - 1;
    for (int i = 0; i < s.k(); ++i) {
      if (s.blocked[i]) continue;
      if (pick == 0) return i;
      --pick;
    }
  }
  // Exploit: uniform over the arms tied at the maximum empirical mean.
  double best = -1e300;
  for (int i = 0; i < s.k(); ++i) {
    if (s.blocked[i]) continue;
    const double m = s.sums[i] / static_cast<double>(s.pulls[i]);
    if (m > best) best = m;
  }
  std::vector<int> tied;
  for (int i = 0; i < s.k(); ++i) {
    if (s.blocked[i]) continue;
    const double m = s.sums[i] / static_cast<double>(s.pulls[i]);
    if (m >= best - mean_tie_tolerance) tied.push_back(i);
  }
  if (tied.size() == 1) return tied.front();
  return tie_winner(s, tied, seed);
}

int policy_select(const PolicyState& s, const PolicyConfig& cfg,
                  std::uint64_t seed) {
  return cfg.kind == PolicyKind::Ucb ? ucb_select(s, cfg, seed)
                                     : eps_greedy_select(s, cfg, seed);
}

void block(PolicyState& s, int arm) {
  if (!s.blocked[arm]) {
    s.blocked[arm] = true;
    s.blocked_count += 1;
  }
}

}  // namespace stratband
