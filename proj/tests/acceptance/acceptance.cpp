// Acceptance gate. Each criterion prints one final verdict line; sub-checks
// get indented lines above it. Exit 0 when every requested criterion passes,
// 1 when any fails, 2 on a configuration error.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratband/engine.hpp"
#include "stratband/runner.hpp"
#include "stratband/scenarios.hpp"

namespace {

using namespace stratband;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json sb_arm(double mean, double cap, bool honest, double a = 1.0) {
  return json{{"mean", mean},
              {"cap", cap},
              {"honest", honest},
              {"distribution", json{{"kind", "scaled-bernoulli"}}},
              {"cost_coefficient", a}};
}

// One-atom law: every raw draw equals the mean.
json point_arm(double mean, double cap, bool honest) {
  return json{{"mean", mean},
              {"cap", cap},
              {"honest", honest},
              {"distribution",
               json{{"kind", "discrete"},
                    {"atoms", json::array({json{{"value", mean}, {"prob", 1.0}}})}}},
              {"cost_coefficient", 1.0}};
}

Instance make_instance(std::int64_t horizon, const std::vector<json>& arms,
                       std::uint64_t seed) {
  json doc;
  doc["horizon"] = horizon;
  doc["arms"] = arms;
  doc["seed"] = seed;
  return build_instance(doc);
}

StrategyPtr named(const char* name) {
  return make_strategy(json{{"name", name}});
}

StrategyPtr target(double level) {
  return make_strategy(json{{"name", "constant_target"}, {"level", level}});
}

RunConfig scenario_run_config(const char* name) {
  return parse_run_config(json::parse(scenario_config(name).dump()));
}

void verdict_line(int id, bool pass, const char* fmt, ...) {
  std::printf("criterion %d: %s  ", id, pass ? "pass" : "FAIL");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
}

void sub_line(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
}

// 1. Two arms delivering the same constant split the pulls within one of
// each other on every path: 100 seeds at n = 10^4, under ten seconds.
bool crit1() {
  Clock::time_point t0 = Clock::now();
  Instance inst = make_instance(
      10000, {sb_arm(0.45, 0.9, true), sb_arm(0.45, 0.9, true)}, 7);
  Profile profile{target(0.9), target(0.9)};
  PolicyConfig ucb;
  FataReport r = verify_fata(inst, ucb, profile, {0, 1}, seed_list(1, 100));
  double elapsed = seconds_since(t0);
  bool ok = r.exact_mode && r.pass && r.max_discrepancy <= 1 && elapsed < 10.0;
  verdict_line(1, ok,
               "ucb pull counts of two constant-0.9 arms differ by at most "
               "%lld across 100 seeds and every round (%.1f s)",
               static_cast<long long>(r.max_discrepancy), elapsed);
  return ok;
}

bool monotone_criterion(int id, PolicyConfig policy, const char* label) {
  Clock::time_point t0 = Clock::now();
  Instance inst = make_instance(20000,
                                {sb_arm(0.5, 1.0, false), sb_arm(0.5, 0.8, true),
                                 sb_arm(0.4, 0.7, true)},
                                11);
  Controller ctrl = Controller::for_policy(policy);
  Profile base{named("honest_passive"), named("honest_passive"),
               named("honest_passive")};
  StrategyPtr dev = named("top_performance");
  int containment_failures = 0;
  int monotone_failures = 0;
  for (std::uint64_t seed : seed_list(1, 200)) {
    CoupledPair pair = coupled_replay(inst, ctrl, base, 0, dev, seed);
    if (!pair.containment) ++containment_failures;
    if (!pair.counts_monotone) ++monotone_failures;
  }
  double elapsed = seconds_since(t0);
  bool ok = containment_failures == 0 && monotone_failures == 0;
  if (id == 2) ok = ok && elapsed < 30.0;
  verdict_line(id, ok,
               "%s coupled replays: %d containment and %d count violations "
               "over 200 seeds (%.1f s)",
               label, containment_failures, monotone_failures, elapsed);
  return ok;
}

// 2. Raising one arm's deliveries never steals the order of everyone else's
// pulls, path by path, under ucb.
bool crit2() {
  return monotone_criterion(2, PolicyConfig{}, "ucb");
}

// 3. Same property for eps-greedy; exploration and tie coins are shared
// between the coupled runs by construction.
bool crit3() {
  PolicyConfig eps;
  eps.kind = PolicyKind::EpsGreedy;
  eps.c = 2.0;
  return monotone_criterion(3, eps, "eps-greedy (c=2)");
}

// 4. Revenue floor against three adversarial suites, for both policies.
// The eps-greedy leg uses schedule constant c=1: the default c=32 pins
// epsilon at 1 for these horizons, which turns the run into pure uniform
// exploration and no policy could clear the floor there.
bool crit4() {
  Instance inst = make_instance(100000,
                                {sb_arm(0.6, 1.0, true), sb_arm(0.5, 1.0, false),
                                 sb_arm(0.5, 1.0, false)},
                                42);
  StrategyPtr honest = named("honest_passive");
  StrategyPtr absorb = named("absorb_all");
  StrategyPtr mimic = make_strategy(json{{"name", "mimic_then_absorb"},
                                         {"level", 0.65},
                                         {"switch_pulls", 25000}});
  std::vector<Profile> suites = {
      {honest, absorb, absorb},
      {honest, mimic, mimic},
      {honest, target(0.5), target(0.5)},
  };
  std::vector<std::uint64_t> seeds = seed_list(1, 200);

  PolicyConfig eps;
  eps.kind = PolicyKind::EpsGreedy;
  eps.c = 1.0;
  bool ok = true;
  double floor = 0.0;
  struct Leg { const char* label; PolicyConfig policy; };
  for (const Leg& leg : {Leg{"ucb", PolicyConfig{}}, Leg{"eps-greedy (c=1)", eps}}) {
    FloorReport r = revenue_floor_check(inst, Controller::for_policy(leg.policy),
                                        suites, 4.0, seeds);
    floor = r.floor;
    sub_line("%s: worst revenue per round %.4f against floor %.4f (%s)",
             leg.label, r.profiles[r.worst].revenue_per_round, r.floor,
             r.pass ? "pass" : "FAIL");
    ok = ok && r.pass;
  }
  verdict_line(4, ok,
               "revenue per round stayed above %.4f for all three adversarial "
               "suites under both policies",
               floor);
  return ok;
}

// 5. Captured pulls must be paid for: a 0.3-mean arm holding the lead by
// delivering 0.65 spends at least 0.3 per pull, up to the o(n) slack.
bool crit5() {
  Instance inst = make_instance(
      100000, {sb_arm(0.3, 1.0, false), sb_arm(0.6, 1.0, true)}, 3);
  Profile profile{target(0.65), named("honest_passive")};
  AdaptivityReport r = estimate_sharp_adaptivity(
      inst, PolicyConfig{}, profile, 0, 0.05, 4.0, seed_list(1, 200));
  bool ok = r.pass && !r.vacuous;
  verdict_line(5, ok,
               "test arm captured %.0f%% of pulls and spent %.0f effort, "
               "required at least %.0f",
               100.0 * r.alpha_hat, r.mean_effort, r.required_effort);
  return ok;
}

// 6. Normalized regret is flat across a 16x horizon ladder.
bool crit6() {
  PolicyConfig eps;
  eps.kind = PolicyKind::EpsGreedy;
  eps.c = 2.0;
  std::vector<std::uint64_t> seeds = seed_list(1, 100);
  std::vector<double> normalized;
  for (std::int64_t n : {10000, 40000, 160000}) {
    Instance inst =
        make_instance(n, {sb_arm(0.7, 1.0, true), sb_arm(0.4, 1.0, true)}, 3);
    RegretReport r = regret_ordinary(inst, eps, seeds);
    sub_line("n=%lld: normalized regret %.4f", static_cast<long long>(n),
             r.normalized);
    normalized.push_back(r.normalized);
  }
  double lo = normalized[0], hi = normalized[0];
  for (double v : normalized) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double ratio = hi / lo;
  bool ok = ratio < 2.0;
  verdict_line(6, ok,
               "eps-greedy (c=2) normalized regret varies by %.3fx across "
               "the ladder, bound 2x",
               ratio);
  return ok;
}

// 7. All-top-performance profile on a three-top instance: near-cap revenue,
// an even pull split, and no profitable unilateral exit.
bool crit7() {
  Instance inst = make_instance(100000,
                                {sb_arm(0.7, 0.9, true), sb_arm(0.7, 0.9, false),
                                 sb_arm(0.7, 0.9, false), sb_arm(0.4, 0.5, true)},
                                5);
  Controller ctrl = Controller::for_policy(PolicyConfig{});
  Profile equilibrium{named("top_performance"), named("top_performance"),
                      named("top_performance"), named("honest_passive")};

  MonteCarloSummary mc = monte_carlo(inst, ctrl, equilibrium, seed_list(1, 100));
  bool revenue_ok = mc.revenue_per_round >= 0.9 - 0.02;
  sub_line("revenue per round %.4f against 0.8800 (%s)", mc.revenue_per_round,
           revenue_ok ? "pass" : "FAIL");

  double third = static_cast<double>(inst.horizon) / 3.0;
  bool split_ok = true;
  for (int arm = 0; arm < 3; ++arm) {
    double pulls = mc.arms[arm].pulls.mean;
    bool within = std::fabs(pulls - third) <= 0.05 * third;
    split_ok = split_ok && within;
    sub_line("arm %d mean pulls %.0f, n/3 within 5%% is [%.0f, %.0f] (%s)", arm,
             pulls, 0.95 * third, 1.05 * third, within ? "pass" : "FAIL");
  }

  bool deviations_ok = true;
  std::vector<std::uint64_t> seeds = seed_list(1, 60);
  for (int arm = 0; arm < 3; ++arm) {
    std::vector<json> alts = {json{{"name", "honest_passive"}},
                              json{{"name", "constant_target"}, {"level", 0.7}}};
    if (!inst.arms[arm].honest) alts.push_back(json{{"name", "absorb_all"}});
    for (const json& d : alts) {
      DeviationReport r = deviation_ratio(inst, ctrl, equilibrium, arm,
                                          make_strategy(d), seeds, 0.05);
      bool not_prof = r.verdict == Verdict::NotProfitable;
      deviations_ok = deviations_ok && not_prof;
      sub_line("arm %d -> %s: ratio %.4f, %s", arm,
               d.at("name").get<std::string>().c_str(), r.ratio,
               verdict_name(r.verdict));
    }
  }

  bool ok = revenue_ok && split_ok && deviations_ok;
  verdict_line(7, ok,
               "three-top equilibrium held: revenue %.4f, even split, all 8 "
               "exits not-profitable at tau=0.05",
               mc.revenue_per_round);
  return ok;
}

// 8. Under an all-passive profile on a four-top instance that satisfies the
// competition condition, the least-pulled arm profits by moving to
// top-performance play.
bool crit8() {
  RunConfig rc = scenario_run_config("thm-5.3-deviation");
  ConditionReport cond = check_condition_5_1(rc.instance);
  sub_line("competition condition: k_top %d > threshold %.4f (%s)",
           rc.instance.k_top, cond.threshold, cond.holds ? "pass" : "FAIL");
  RunResult rr = execute(rc);
  double ratio = rr.summary["results"]["ratio"].get<double>();
  double ci_lo = rr.summary["results"]["ci"][0].get<double>();
  bool ok = cond.holds && rr.exit_code == 0 && ci_lo > 1.0;
  verdict_line(8, ok,
               "least-pulled arm's move to top performance is profitable: "
               "ratio %.3f, ci lower bound %.3f > 1",
               ratio, ci_lo);
  return ok;
}

// 9. Auction equilibrium at n = 10^5, rho = 1. The reward phase reserves
// 62% of this horizon, so measured revenue lands near 0.59 and the 0.75
// floor is out of reach at this scale; the first sub-check records that
// honestly. The informational line shows the gap closing at n = 10^6.
bool crit9() {
  std::vector<json> arms = {point_arm(0.1, 1.0, false), point_arm(0.1, 0.8, true),
                            point_arm(0.1, 0.3, true)};
  Instance inst = make_instance(100000, arms, 9);
  Controller ctrl = Controller::for_mechanism(SpPiConfig{});
  Profile profile{named("sp_pi_equilibrium"), named("sp_pi_equilibrium"),
                  named("sp_pi_equilibrium")};

  MonteCarloSummary mc = monte_carlo(inst, ctrl, profile, seed_list(1, 100));
  bool revenue_ok = mc.revenue_per_round >= 0.8 - 0.05;
  sub_line("revenue per round %.4f against 0.7500 (%s)", mc.revenue_per_round,
           revenue_ok ? "pass" : "FAIL");

  bool blocking_ok = mc.blocking_events == 0;
  sub_line("blocking events %lld (%s)",
           static_cast<long long>(mc.blocking_events),
           blocking_ok ? "pass" : "FAIL");

  EpisodeOptions opt;
  opt.record_rounds = true;
  EpisodeOutcome ep = run_episode(inst, ctrl, profile, 1, opt);
  double expected = 0.8 + 1.0 / std::log(100000.0);
  std::int64_t checked = 0;
  bool delivery_ok = true;
  for (const RoundLogEntry& row : ep.round_log) {
    if (row.phase != Phase::Pi || row.arm != 0) continue;
    ++checked;
    if (std::fabs(row.delivered - expected) > 1e-9) delivery_ok = false;
  }
  delivery_ok = delivery_ok && checked > 0;
  sub_line("top arm delivered %.9f on each of its %lld inner-phase pulls (%s)",
           expected, static_cast<long long>(checked),
           delivery_ok ? "pass" : "FAIL");

  Instance big = make_instance(1000000, arms, 9);
  MonteCarloSummary wide = monte_carlo(big, ctrl, profile, seed_list(1, 3));
  sub_line("informational: revenue per round %.4f at n=10^6 (3 seeds)",
           wide.revenue_per_round);

  bool ok = revenue_ok && blocking_ok && delivery_ok;
  verdict_line(9, ok,
               "auction equilibrium: revenue %.4f vs floor 0.7500, blocking "
               "%lld, inner-phase deliveries exact",
               mc.revenue_per_round, static_cast<long long>(mc.blocking_events));
  return ok;
}

// 10. The same undercutting deviation flips from profitable to punished
// when the blocking rule is switched on.
bool crit10() {
  RunConfig rc = scenario_run_config("remark-6.1-blocking");
  RunResult rr = execute(rc);
  const ordered_json& res = rr.summary["results"];
  const ordered_json& blocked = res["blocked"];
  const ordered_json& open = res["unblocked"];
  double pulls = blocked["dev_pulls_mean"].get<double>();
  double bound = blocked["pulls_bound"].get<double>();
  sub_line("blocking on: ratio %.3f, %s, deviator pulls %.0f within bound %.0f",
           blocked["ratio"].get<double>(),
           blocked["verdict"].get<std::string>().c_str(), pulls, bound);
  sub_line("blocking off: ratio %.3f, ci lower bound %.3f, %s",
           open["ratio"].get<double>(), open["ci"][0].get<double>(),
           open["verdict"].get<std::string>().c_str());
  bool ok = rr.exit_code == 0 &&
            blocked["verdict"].get<std::string>() == "not-profitable" &&
            pulls <= bound && open["verdict"].get<std::string>() == "profitable" &&
            open["ci"][0].get<double>() > 1.0;
  verdict_line(10, ok,
               "bid-undercutting profits only when blocking is disabled");
  return ok;
}

// 11. The randomized lift plan hits its target mean exactly in expectation,
// empirically within 0.002, and never spends negative effort.
bool crit11() {
  RunConfig rc = scenario_run_config("appendix-D-mixture");
  RunResult rr = execute(rc);
  const ordered_json& res = rr.summary["results"];
  double empirical = res["empirical_mean"].get<double>();
  double exact = res["exact_mean"].get<double>();
  double min_effort = res["min_effort"].get<double>();
  sub_line("empirical mean %.5f, exact mean %.15f, min effort %.6f", empirical,
           exact, min_effort);
  bool ok = rr.exit_code == 0 && std::fabs(exact - 0.9) <= 1e-12 &&
            std::fabs(empirical - 0.9) <= 0.002 && min_effort >= 0.0;
  verdict_line(11, ok,
               "lift plan delivered 0.9 exactly in expectation and %.5f over "
               "10^6 pulls with nonnegative effort",
               empirical);
  return ok;
}

// 12. Against a weaker rival, staying passive beats top-performance play by
// a wide margin for the stronger arm.
bool crit12() {
  RunConfig rc = scenario_run_config("appendix-E-non-dominance");
  RunResult rr = execute(rc);
  double ratio = rr.summary["results"]["ratio"].get<double>();
  double ci_lo = rr.summary["results"]["ci"][0].get<double>();
  bool ok = rr.exit_code == 0 && ci_lo > 1.3;
  verdict_line(12, ok,
               "passive play earned %.3fx the top-performance utility, ci "
               "lower bound %.3f > 1.3",
               ratio, ci_lo);
  return ok;
}

// 13. With an unsustainable cap advantage, nudging one raw draw above the
// rival's cap captures the eps-greedy exploitation stream.
bool crit13() {
  RunConfig rc = scenario_run_config("thm-F.3-unsustainable");
  SustainabilityReport s0 = compute_sustainability(rc.instance.arms[0]);
  SustainabilityReport s1 = compute_sustainability(rc.instance.arms[1]);
  bool shape_ok = !s0.sustainable && s1.sustainable &&
                  std::fabs(s0.m_f - s1.m_f) < 1e-9 &&
                  std::fabs(s1.m_f - rc.instance.arms[1].cap) < 1e-9 &&
                  rc.instance.arms[0].cap > s0.m_f;
  sub_line("arm 0 cap %.1f exceeds its sustainable cap %.2f; arm 1 cap %.1f "
           "equals its own (%s)",
           rc.instance.arms[0].cap, s0.m_f, rc.instance.arms[1].cap,
           shape_ok ? "pass" : "FAIL");
  RunResult rr = execute(rc);
  double ratio = rr.summary["results"]["ratio"].get<double>();
  double ci_lo = rr.summary["results"]["ci"][0].get<double>();
  bool ok = shape_ok && rr.exit_code == 0 && ci_lo > 1.5;
  verdict_line(13, ok,
               "first-pull overshoot earned %.3fx under eps-greedy (c=2), ci "
               "lower bound %.3f > 1.5",
               ratio, ci_lo);
  return ok;
}

// 14. Worker count is a throughput knob only: the summary JSON is
// byte-identical at 1 and 8 workers, for a policy run and an auction run.
bool crit14() {
  unsetenv("STRAT_BANDIT_WORKERS");

  json policy_doc;
  policy_doc["experiment"] = "monte-carlo";
  policy_doc["instance"] =
      json{{"horizon", 20000},
           {"arms", std::vector<json>{sb_arm(0.7, 0.9, true), sb_arm(0.7, 0.9, false),
                                      sb_arm(0.7, 0.9, false), sb_arm(0.4, 0.5, true)}},
           {"seed", 5}};
  policy_doc["policy"] = json{{"name", "ucb"}};
  policy_doc["profile"] = json::array({json{{"name", "top_performance"}},
                                       json{{"name", "top_performance"}},
                                       json{{"name", "top_performance"}},
                                       json{{"name", "honest_passive"}}});
  policy_doc["seeds"] = json{{"count", 40}, {"base", 1}};

  json auction_doc;
  auction_doc["experiment"] = "monte-carlo";
  auction_doc["instance"] =
      json{{"horizon", 50000},
           {"arms", std::vector<json>{point_arm(0.1, 1.0, false),
                                      point_arm(0.1, 0.8, true),
                                      point_arm(0.1, 0.3, true)}},
           {"seed", 9}};
  auction_doc["mechanism"] =
      json{{"mechanism", "sp_pi"}, {"rho", 1.0}, {"inner_policy", "ucb"}};
  auction_doc["profile"] = json::array({json{{"name", "sp_pi_equilibrium"}},
                                        json{{"name", "sp_pi_equilibrium"}},
                                        json{{"name", "sp_pi_equilibrium"}}});
  auction_doc["seeds"] = json{{"count", 12}, {"base", 3}};

  bool ok = true;
  struct Case { const char* label; const json* doc; };
  for (const Case& c : {Case{"policy", &policy_doc}, Case{"auction", &auction_doc}}) {
    RunConfig rc = parse_run_config(*c.doc);
    rc.workers = 1;
    std::string one = execute(rc).summary.dump(2);
    rc.workers = 8;
    std::string eight = execute(rc).summary.dump(2);
    bool same = one == eight;
    ok = ok && same;
    sub_line("%s run: %zu summary bytes, workers 1 vs 8 %s", c.label, one.size(),
             same ? "identical" : "DIFFER");
  }
  verdict_line(14, ok, "summaries are byte-identical at worker counts 1 and 8");
  return ok;
}

using Criterion = bool (*)();

const Criterion kCriteria[] = {crit1, crit2, crit3,  crit4,  crit5,  crit6,
                               crit7, crit8, crit9,  crit10, crit11, crit12,
                               crit13, crit14};

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  const int total = static_cast<int>(std::size(kCriteria));
  if (which < 0 || which > total) {
    std::fprintf(stderr, "criterion out of range: %d\n", which);
    return 2;
  }
  try {
    bool all = true;
    if (which == 0) {
      for (const Criterion& c : kCriteria) all = c() && all;
    } else {
      all = kCriteria[which - 1]();
    }
    std::fflush(stdout);
    return all ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
