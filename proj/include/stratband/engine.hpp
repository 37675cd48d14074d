#pragma once

#include "stratband/core.hpp"
#include "stratband/mechanism.hpp"
#include "stratband/policies.hpp"
#include "stratband/strategies.hpp"

namespace stratband {

// A run is driven either by a bare bandit policy or by the full auction
// mechanism wrapping one.
struct Controller {
  enum class Kind { Policy, Mechanism };
  Kind kind = Kind::Policy;
  PolicyConfig policy;
  SpPiConfig mech;

  static Controller for_policy(PolicyConfig p) {
    return {Kind::Policy, p, {}};
  }
  static Controller for_mechanism(SpPiConfig m) {
    return {Kind::Mechanism, {}, m};
  }
};

EpisodeOutcome run_episode(const Instance& inst, const Controller& ctrl,
                           const Profile& profile, std::uint64_t seed,
                           const EpisodeOptions& opt = {});

struct CoupledPair {
  EpisodeOutcome base;
  EpisodeOutcome deviated;
  // The deviated run's pull sequence, with the deviating arm's rounds
  // removed, is contained in the base run's (same removal) in order.
  bool containment = false;
  // T_j never increases for any j other than the deviator.
  bool counts_monotone = false;
};

CoupledPair coupled_replay(const Instance& inst, const Controller& ctrl,
                           const Profile& base_profile, int deviating_arm,
                           const StrategyPtr& alt, std::uint64_t seed);

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sd / sqrt(count)
};

struct ArmStats {
  Estimate pulls;
  Estimate effort;
  Estimate utility;
};

struct MonteCarloSummary {
  std::int64_t horizon = 0;
  int count = 0;
  std::vector<ArmStats> arms;
  Estimate revenue;
  double revenue_per_round = 0.0;
  std::int64_t blocking_events = 0;  // total arms blocked across episodes
};

// workers <= 0 picks the hardware default. Aggregation is a fold over the
// seed order, so the worker count never changes any output bit.
std::vector<EpisodeOutcome> run_many(const Instance& inst,
                                     const Controller& ctrl,
                                     const Profile& profile,
                                     const std::vector<std::uint64_t>& seeds,
                                     int workers = 0,
                                     const EpisodeOptions& opt = {});

MonteCarloSummary monte_carlo(const Instance& inst, const Controller& ctrl,
                              const Profile& profile,
                              const std::vector<std::uint64_t>& seeds,
                              int workers = 0);

MonteCarloSummary summarize(const Instance& inst,
                            const std::vector<EpisodeOutcome>& outcomes);

struct FataReport {
  std::vector<int> subset;
  bool exact_mode = false;       // per-path bound, as opposed to statistical
  std::int64_t max_discrepancy = 0;  // exact mode: max over t, pairs, seeds
  double max_mean_gap = 0.0;     // statistical mode: worst |T̂_i - T̂_j|
  double allowed_gap = 0.0;      // statistical mode: joint confidence bound
  bool pass = false;
};

// The subset arms must deliver one identical constant. Exact mode demands
// |T_i(t) - T_j(t)| <= 1 on every path and round; statistical mode demands
// equal means within a Bonferroni-adjusted confidence bound.
FataReport verify_fata(const Instance& inst, const PolicyConfig& policy,
                       const Profile& profile, const std::vector<int>& subset,
                       const std::vector<std::uint64_t>& seeds,
                       int workers = 0);

struct AdaptivityReport {
  int test_arm = 0;
  double mean_pulls = 0.0;
  double mean_effort = 0.0;
  double alpha_hat = 0.0;    // mean_pulls / n
  double alpha_threshold = 0.0;
  double slack = 0.0;        // c_s * sqrt(n ln n)
  double required_effort = 0.0;
  bool vacuous = false;      // test arm never captured alpha_threshold of pulls
  bool pass = false;
};

// Captured pulls must have been paid for: whenever the test arm holds at
// least alpha_threshold of all pulls, its total effort must be at least
// (mu_h - mu_i) per captured pull, up to slack.
AdaptivityReport estimate_sharp_adaptivity(
    const Instance& inst, const PolicyConfig& policy, const Profile& profile,
    int test_arm, double alpha_threshold, double slack_coefficient,
    const std::vector<std::uint64_t>& seeds, int workers = 0);

enum class Verdict { Profitable, NotProfitable, Indeterminate };

const char* verdict_name(Verdict v);

struct DeviationReport {
  int arm = 0;
  ordered_json baseline;   // descriptor of the strategy deviated from
  ordered_json deviation;  // descriptor of the alternative
  Estimate base_utility;
  Estimate dev_utility;
  double ratio = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double tau = 0.0;
  Verdict verdict = Verdict::Indeterminate;
};

// Ratio of expected utilities û(deviation)/û(baseline) over the same seed
// list, with a paired delta-method interval. Profitable only when the whole
// interval clears 1+tau; NotProfitable only when it stays below; anything
// else, including a baseline indistinguishable from zero, is Indeterminate.
DeviationReport deviation_ratio(const Instance& inst, const Controller& ctrl,
                                const Profile& base_profile, int arm,
                                const StrategyPtr& alt,
                                const std::vector<std::uint64_t>& seeds,
                                double tau, int workers = 0);

struct RegretReport {
  double best_mean = 0.0;
  Estimate revenue;
  double regret = 0.0;      // n * best_mean - mean revenue
  double normalized = 0.0;  // regret / (n^(2/3) k^(1/3) (ln n)^(1/3))
};

// Ordinary stochastic setting: every arm plays honest_passive.
RegretReport regret_ordinary(const Instance& inst, const PolicyConfig& policy,
                             const std::vector<std::uint64_t>& seeds,
                             int workers = 0);

struct FloorProfileResult {
  ordered_json profile;
  double revenue_per_round = 0.0;
  bool pass = false;
};

struct FloorReport {
  double mu_h = 0.0;
  double slack = 0.0;
  double floor = 0.0;  // mu_h - slack / n, per round
  std::vector<FloorProfileResult> profiles;
  int worst = 0;       // index of the lowest-revenue profile
  bool pass = false;
};

// Revenue must stay above the honest-arm mean minus slack no matter what
// the non-honest arms do; each candidate adversarial profile is checked.
FloorReport revenue_floor_check(const Instance& inst, const Controller& ctrl,
                                const std::vector<Profile>& profiles,
                                double slack_coefficient,
                                const std::vector<std::uint64_t>& seeds,
                                int workers = 0);

// o(n) slack instantiation shared by the verifiers.
double slack_term(std::int64_t horizon, double coefficient);

// Upper normal quantile, e.g. 1.96 for p = 0.975.
double normal_quantile(double p);

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count);

}  // namespace stratband
