#include "stratband/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace stratband {

namespace {

// One in-flight episode: histories, accounting, and the single pull path
// both the bare-policy loop and the mechanism phases go through.
struct Episode {
  const Instance& inst;
  const Profile& profile;
  std::uint64_t seed;
  EpisodeOptions opt;
  std::vector<OwnHistory> hist;
  EpisodeOutcome out;
  std::int64_t round = 0;

  Episode(const Instance& instance, const Profile& prof, std::uint64_t s,
          const EpisodeOptions& options)
      : inst(instance), profile(prof), seed(s), opt(options) {
    const int k = inst.k();
    if (static_cast<int>(profile.size()) != k)
      fail(Err::ConfigRejected,
           "profile assigns " + std::to_string(profile.size()) +
               " strategies to " + std::to_string(k) + " arms");
    hist.resize(k);
    out.horizon = inst.horizon;
    out.seed = seed;
    out.pulls.assign(k, 0);
    out.effort.assign(k, 0.0);
    out.cost.assign(k, 0.0);
    out.utility.assign(k, 0.0);
    if (opt.record_pull_sequence) out.pull_sequence.reserve(inst.horizon);
  }

  double pull(int arm, Phase phase, bool blocked_flag) {
    const ArmSpec& spec = inst.arms[arm];
    const std::int64_t index = out.pulls[arm] + 1;  // 1-based pull index
    const double raw = sample_raw({seed, arm}, spec, index);
    rng::Stream coin{seed, rng::strategy_stream(arm),
                     rng::strategy_index(static_cast<std::uint64_t>(index), 0)};
    const double effort =
        profile[arm]->effort(spec, inst.horizon, hist[arm], raw, coin);
    const double delivered = validate_effort(spec, raw, effort);
    round += 1;
    out.pulls[arm] += 1;
    out.effort[arm] += effort;
    out.cost[arm] += cost_of(spec, effort);
    out.revenue += delivered;
    hist[arm].own_pull_count += 1;
    hist[arm].records.push_back({index, raw, effort, delivered});
    if (opt.record_pull_sequence)
      out.pull_sequence.push_back(static_cast<std::int32_t>(arm));
    if (opt.record_rounds)
      out.round_log.push_back(
          {round, arm, raw, effort, delivered, blocked_flag, phase});
    return delivered;
  }

  void announce(const std::string& tag, double value) {
    for (auto& h : hist) h.announcements.push_back({tag, value});
  }

  EpisodeOutcome finish() {
    if (round != inst.horizon)
      throw std::logic_error("episode accounting: played " +
                             std::to_string(round) + " of " +
                             std::to_string(inst.horizon) + " rounds");
    for (int i = 0; i < inst.k(); ++i)
      out.utility[i] =
          static_cast<double>(out.pulls[i]) - out.cost[i];
    return std::move(out);
  }
};

EpisodeOutcome run_policy_episode(const Instance& inst,
                                  const PolicyConfig& cfg,
                                  const Profile& profile, std::uint64_t seed,
                                  const EpisodeOptions& opt) {
  Episode ep(inst, profile, seed, opt);
  PolicyState state;
  state.init(inst.k(), inst.horizon);
  for (std::int64_t r = 0; r < inst.horizon; ++r) {
    const int arm = policy_select(state, cfg, seed);
    const double delivered = ep.pull(arm, Phase::Play, false);
    state.observe(arm, delivered);
  }
  return ep.finish();
}

}  // namespace

EpisodeOutcome run_sp_pi(const Instance& inst, const Profile& profile,
                         const SpPiConfig& cfg, std::uint64_t seed,
                         const EpisodeOptions& opt) {
  validate_sp_pi(inst, cfg);
  const int k = inst.k();
  const std::int64_t n = inst.horizon;
  const std::int64_t reserved = sp_pi_reserved_rounds(k, n, cfg.rho);
  const std::int64_t pi_stop = n - reserved;  // last nominal inner round

  Episode ep(inst, profile, seed, opt);
  ep.out.blocked.assign(k, false);
  ep.out.phase_marks.bidding_start = 1;

  AuctionState auction;
  auction.bids.resize(k);
  auction.blocked.assign(k, false);
  auction.mu_pi.assign(k, 0.0);
  auction.phase = Phase::Bid;
  for (int arm = 0; arm < k; ++arm)
    auction.bids[arm] = ep.pull(arm, Phase::Bid, false);
  auction.m_prime = second_highest(auction.bids);
  ep.announce(announce_second_bid, auction.m_prime);

  // Inner phase with fresh statistics; bidding rewards are forgotten.
  auction.phase = Phase::Pi;
  ep.out.phase_marks.pi_start = ep.round + 1;
  PolicyState inner;
  inner.init(k, n);
  auto inner_round = [&] {
    const int arm = policy_select(inner, cfg.inner, seed);
    const double delivered = ep.pull(arm, Phase::Pi, auction.blocked[arm]);
    inner.observe(arm, delivered);
    if (cfg.blocking && !auction.blocked[arm] &&
        blocking_check(auction, arm, delivered)) {
      block(inner, arm);
      auction.blocked[arm] = true;
      ep.out.blocked[arm] = true;
    }
  };
  while (ep.round < pi_stop) inner_round();

  // Reward-phase lengths come from the inner means frozen at the nominal
  // stop; whatever the randomized rounding leaves unused goes back to the
  // inner phase so the horizon is filled exactly.
  for (int i = 0; i < k; ++i)
    auction.mu_pi[i] =
        inner.pulls[i] > 0
            ? inner.sums[i] / static_cast<double>(inner.pulls[i])
            : 0.0;
  std::vector<std::int64_t> reward_rounds(k);
  std::int64_t reward_total = 0;
  rng::Stream mech{seed, rng::mechanism_stream, 0};
  for (int i = 0; i < k; ++i) {
    reward_rounds[i] = reward_phase_rounds(auction.mu_pi[i], n, cfg.rho, mech);
    reward_total += reward_rounds[i];
  }
  if (reward_total > reserved)
    throw std::logic_error("reward phase exceeds its reserved budget");
  const std::int64_t tail = reserved - reward_total;
  for (std::int64_t r = 0; r < tail; ++r) inner_round();

  // Closing phase: every arm is paid its rounds, blocked ones included.
  auction.phase = Phase::Reward;
  ep.out.phase_marks.reward_start = ep.round + 1;
  ep.announce(announce_reward_phase, 0.0);
  for (int arm = 0; arm < k; ++arm)
    for (std::int64_t r = 0; r < reward_rounds[arm]; ++r)
      ep.pull(arm, Phase::Reward, auction.blocked[arm]);

  return ep.finish();
}

EpisodeOutcome run_episode(const Instance& inst, const Controller& ctrl,
                           const Profile& profile, std::uint64_t seed,
                           const EpisodeOptions& opt) {
  if (ctrl.kind == Controller::Kind::Policy)
    return run_policy_episode(inst, ctrl.policy, profile, seed, opt);
  return run_sp_pi(inst, profile, ctrl.mech, seed, opt);
}

namespace {

std::vector<std::int32_t> without_arm(const std::vector<std::int32_t>& seq,
                                      int arm) {
  std::vector<std::int32_t> rest;
  rest.reserve(seq.size());
  for (std::int32_t a : seq)
    if (a != arm) rest.push_back(a);
  return rest;
}

bool is_subsequence(const std::vector<std::int32_t>& needle,
                    const std::vector<std::int32_t>& haystack) {
  std::size_t i = 0;
  for (std::int32_t b : needle) {
    while (i < haystack.size() && haystack[i] != b) ++i;
    if (i == haystack.size()) return false;
    ++i;
  }
  return true;
}

}  // namespace

CoupledPair coupled_replay(const Instance& inst, const Controller& ctrl,
                           const Profile& base_profile, int deviating_arm,
                           const StrategyPtr& alt, std::uint64_t seed) {
  EpisodeOptions opt;
  opt.record_pull_sequence = true;
  Profile deviated = base_profile;
  deviated[deviating_arm] = alt;
  CoupledPair pair;
  pair.base = run_episode(inst, ctrl, base_profile, seed, opt);
  pair.deviated = run_episode(inst, ctrl, deviated, seed, opt);
  pair.containment =
      is_subsequence(without_arm(pair.deviated.pull_sequence, deviating_arm),
                     without_arm(pair.base.pull_sequence, deviating_arm));
  pair.counts_monotone = true;
  for (int j = 0; j < inst.k(); ++j)
    if (j != deviating_arm && pair.deviated.pulls[j] > pair.base.pulls[j])
      pair.counts_monotone = false;
  return pair;
}

std::vector<EpisodeOutcome> run_many(const Instance& inst,
                                     const Controller& ctrl,
                                     const Profile& profile,
                                     const std::vector<std::uint64_t>& seeds,
                                     int workers, const EpisodeOptions& opt) {
  std::vector<EpisodeOutcome> results(seeds.size());
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  workers = std::min<std::size_t>(workers, seeds.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      results[i] = run_episode(inst, ctrl, profile, seeds[i], opt);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        results[i] = run_episode(inst, ctrl, profile, seeds[i], opt);
      } catch (...) {
        std::lock_guard<std::mutex> hold(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

namespace {

Estimate estimate_of(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / m;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  return {mean, 1.96 * sd / std::sqrt(m)};
}

double sample_cov(const std::vector<double>& xs, const std::vector<double>& ys,
                  double x_mean, double y_mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    s += (xs[i] - x_mean) * (ys[i] - y_mean);
  return s / (static_cast<double>(xs.size()) - 1.0);
}

}  // namespace

MonteCarloSummary summarize(const Instance& inst,
                            const std::vector<EpisodeOutcome>& outcomes) {
  if (outcomes.size() < 2)
    fail(Err::ConfigRejected, "aggregation needs at least 2 seeds");
  MonteCarloSummary s;
  s.horizon = inst.horizon;
  s.count = static_cast<int>(outcomes.size());
  const int k = inst.k();
  std::vector<double> column(outcomes.size());
  for (int arm = 0; arm < k; ++arm) {
    ArmStats stats;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      column[i] = static_cast<double>(outcomes[i].pulls[arm]);
    stats.pulls = estimate_of(column);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      column[i] = outcomes[i].effort[arm];
    stats.effort = estimate_of(column);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      column[i] = outcomes[i].utility[arm];
    stats.utility = estimate_of(column);
    s.arms.push_back(stats);
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    column[i] = outcomes[i].revenue;
  s.revenue = estimate_of(column);
  s.revenue_per_round = s.revenue.mean / static_cast<double>(inst.horizon);
  for (const auto& out : outcomes)
    for (bool b : out.blocked)
      if (b) s.blocking_events += 1;
  return s;
}

MonteCarloSummary monte_carlo(const Instance& inst, const Controller& ctrl,
                              const Profile& profile,
                              const std::vector<std::uint64_t>& seeds,
                              int workers) {
  return summarize(inst, run_many(inst, ctrl, profile, seeds, workers));
}

FataReport verify_fata(const Instance& inst, const PolicyConfig& policy,
                       const Profile& profile, const std::vector<int>& subset,
                       const std::vector<std::uint64_t>& seeds, int workers) {
  FataReport report;
  report.subset = subset;
  report.exact_mode = policy.kind == PolicyKind::Ucb;
  if (subset.size() < 2) {  // nothing to compare
    report.pass = true;
    return report;
  }
  EpisodeOptions opt;
  opt.record_pull_sequence = report.exact_mode;
  const auto outcomes = run_many(inst, Controller::for_policy(policy), profile,
                                 seeds, workers, opt);
  if (report.exact_mode) {
    for (const auto& out : outcomes) {
      std::vector<std::int64_t> count(inst.k(), 0);
      for (std::int32_t arm : out.pull_sequence) {
        count[arm] += 1;
        std::int64_t lo = count[subset.front()], hi = lo;
        for (int i : subset) {
          lo = std::min(lo, count[i]);
          hi = std::max(hi, count[i]);
        }
        report.max_discrepancy = std::max(report.max_discrepancy, hi - lo);
      }
    }
    report.pass = report.max_discrepancy <= 1;
    return report;
  }
  // Statistical mode: all pairwise mean pull counts must agree within a
  // Bonferroni-adjusted 95% bound on the difference.
  const int pairs =
      static_cast<int>(subset.size() * (subset.size() - 1) / 2);
  const double z = normal_quantile(1.0 - 0.025 / pairs);
  report.pass = true;
  std::vector<double> diff(outcomes.size());
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      for (std::size_t s = 0; s < outcomes.size(); ++s)
        diff[s] = static_cast<double>(outcomes[s].pulls[subset[a]]) -
                  static_cast<double>(outcomes[s].pulls[subset[b]]);
      const Estimate e = estimate_of(diff);
      const double allowed = z * e.half_width / 1.96;
      if (std::abs(e.mean) > report.max_mean_gap) {
        report.max_mean_gap = std::abs(e.mean);
        report.allowed_gap = allowed;
      }
      if (std::abs(e.mean) > allowed) report.pass = false;
    }
  return report;
}

AdaptivityReport estimate_sharp_adaptivity(
    const Instance& inst, const PolicyConfig& policy, const Profile& profile,
    int test_arm, double alpha_threshold, double slack_coefficient,
    const std::vector<std::uint64_t>& seeds, int workers) {
  const MonteCarloSummary s = monte_carlo(
      inst, Controller::for_policy(policy), profile, seeds, workers);
  AdaptivityReport report;
  report.test_arm = test_arm;
  report.mean_pulls = s.arms[test_arm].pulls.mean;
  report.mean_effort = s.arms[test_arm].effort.mean;
  report.alpha_hat =
      report.mean_pulls / static_cast<double>(inst.horizon);
  report.alpha_threshold = alpha_threshold;
  report.slack = slack_term(inst.horizon, slack_coefficient);
  const double gap = inst.honest_mean - inst.arms[test_arm].mean;
  report.required_effort = gap * report.mean_pulls - report.slack;
  report.vacuous = report.alpha_hat < alpha_threshold;
  report.pass =
      report.vacuous || report.mean_effort >= report.required_effort;
  return report;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Profitable: return "profitable";
    case Verdict::NotProfitable: return "not-profitable";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

DeviationReport deviation_ratio(const Instance& inst, const Controller& ctrl,
                                const Profile& base_profile, int arm,
                                const StrategyPtr& alt,
                                const std::vector<std::uint64_t>& seeds,
                                double tau, int workers) {
  if (seeds.size() < 2)
    fail(Err::ConfigRejected, "deviation_ratio needs at least 2 seeds");
  Profile deviated = base_profile;
  deviated[arm] = alt;
  const auto base_out = run_many(inst, ctrl, base_profile, seeds, workers);
  const auto dev_out = run_many(inst, ctrl, deviated, seeds, workers);
  std::vector<double> y(seeds.size()), x(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    y[i] = base_out[i].utility[arm];
    x[i] = dev_out[i].utility[arm];
  }

  DeviationReport report;
  report.arm = arm;
  report.baseline = base_profile[arm]->descriptor();
  report.deviation = alt->descriptor();
  report.base_utility = estimate_of(y);
  report.dev_utility = estimate_of(x);
  report.tau = tau;

  const double y_mean = report.base_utility.mean;
  const double x_mean = report.dev_utility.mean;
  // A baseline utility indistinguishable from zero (or below it) leaves the
  // ratio undefined; report that rather than a verdict.
  if (y_mean <= 0.0 || std::abs(y_mean) <= report.base_utility.half_width) {
    report.ratio = x_mean / y_mean;
    report.verdict = Verdict::Indeterminate;
    return report;
  }
  report.ratio = x_mean / y_mean;
  const double m = static_cast<double>(seeds.size());
  const double s_xx = sample_cov(x, x, x_mean, x_mean);
  const double s_xy = sample_cov(x, y, x_mean, y_mean);
  const double s_yy = sample_cov(y, y, y_mean, y_mean);
  double var = s_xx / (y_mean * y_mean * m) -
               2.0 * x_mean * s_xy / (y_mean * y_mean * y_mean * m) +
               x_mean * x_mean * s_yy /
                   (y_mean * y_mean * y_mean * y_mean * m);
  if (var < 0.0) var = 0.0;
  const double half = 1.96 * std::sqrt(var);
  report.ci_lo = report.ratio - half;
  report.ci_hi = report.ratio + half;
  if (report.ci_lo > 1.0 + tau)
    report.verdict = Verdict::Profitable;
  else if (report.ci_hi < 1.0 + tau)
    report.verdict = Verdict::NotProfitable;
  else
    report.verdict = Verdict::Indeterminate;
  return report;
}

RegretReport regret_ordinary(const Instance& inst, const PolicyConfig& policy,
                             const std::vector<std::uint64_t>& seeds,
                             int workers) {
  Profile passive;
  for (int i = 0; i < inst.k(); ++i)
    passive.push_back(make_strategy(json{{"name", "honest_passive"}}));
  const MonteCarloSummary s =
      monte_carlo(inst, Controller::for_policy(policy), passive, seeds, workers);
  RegretReport report;
  for (const auto& a : inst.arms)
    report.best_mean = std::max(report.best_mean, a.mean);
  report.revenue = s.revenue;
  const double n = static_cast<double>(inst.horizon);
  report.regret = n * report.best_mean - s.revenue.mean;
  report.normalized =
      report.regret / (std::pow(n, 2.0 / 3.0) *
                       std::cbrt(static_cast<double>(inst.k())) *
                       std::cbrt(std::log(n)));
  return report;
}

FloorReport revenue_floor_check(const Instance& inst, const Controller& ctrl,
                                const std::vector<Profile>& profiles,
                                double slack_coefficient,
                                const std::vector<std::uint64_t>& seeds,
                                int workers) {
  FloorReport report;
  report.mu_h = inst.honest_mean;
  report.slack = slack_term(inst.horizon, slack_coefficient);
  report.floor =
      report.mu_h - report.slack / static_cast<double>(inst.horizon);
  report.pass = true;
  double worst_rpr = 1e300;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const MonteCarloSummary s =
        monte_carlo(inst, ctrl, profiles[p], seeds, workers);
    FloorProfileResult r;
    r.profile = ordered_json::array();
    for (const auto& strat : profiles[p])
      r.profile.push_back(strat->descriptor());
    r.revenue_per_round = s.revenue_per_round;
    r.pass = r.revenue_per_round >= report.floor;
    if (!r.pass) report.pass = false;
    if (r.revenue_per_round < worst_rpr) {
      worst_rpr = r.revenue_per_round;
      report.worst = static_cast<int>(p);
    }
    report.profiles.push_back(std::move(r));
  }
  return report;
}

double slack_term(std::int64_t horizon, double coefficient) {
  const double n = static_cast<double>(horizon);
  return coefficient * std::sqrt(n * std::log(n));
}

double normal_quantile(double p) {
  // Bisection against the normal CDF; plenty of precision for test bounds.
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(count);
  for (int i = 0; i < count; ++i) seeds.push_back(base + i);
  return seeds;
}

}  // namespace stratband
