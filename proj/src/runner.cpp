#include "stratband/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "stratband/scenarios.hpp"
#include "stratband/serialize.hpp"

namespace stratband {

namespace {

const std::set<std::string> kExperiments = {
    "episode",        "monte-carlo",     "coupled",
    "fata",           "sharp-adaptivity", "deviation",
    "regret",         "revenue-floor",   "condition",
    "mixture-check",  "blocking-necessity", "scenario"};

PolicyConfig parse_policy(const json& j) {
  require_object(j, "policy");
  reject_unknown_keys(j, {"name", "randomized_ties", "c"}, "policy");
  PolicyConfig cfg;
  const std::string name = get_string(j, "name", "policy");
  if (name == "ucb") {
    cfg.kind = PolicyKind::Ucb;
    if (j.contains("randomized_ties"))
      cfg.randomized_ties = get_boolean(j, "randomized_ties", "policy");
    if (j.contains("c"))
      fail(Err::ConfigRejected, "policy: 'c' applies to eps-greedy only");
  } else if (name == "eps-greedy") {
    cfg.kind = PolicyKind::EpsGreedy;
    if (j.contains("c")) {
      cfg.c = get_number(j, "c", "policy");
      if (cfg.c <= 0.0) fail(Err::ConfigRejected, "policy: c must be > 0");
    }
    if (j.contains("randomized_ties"))
      fail(Err::ConfigRejected,
           "policy: 'randomized_ties' applies to ucb only; eps-greedy "
           "exploitation ties are always randomized");
  } else {
    fail(Err::ConfigRejected,
         "policy: unknown name '" + name + "' (ucb | eps-greedy)");
  }
  return cfg;
}

SpPiConfig parse_mechanism(const json& j) {
  require_object(j, "mechanism");
  reject_unknown_keys(
      j, {"mechanism", "rho", "inner_policy", "blocking", "inner_c"},
      "mechanism");
  const std::string name = get_string(j, "mechanism", "mechanism");
  if (name != "sp_pi")
    fail(Err::ConfigRejected, "mechanism: unknown mechanism '" + name + "'");
  SpPiConfig cfg;
  if (j.contains("rho")) {
    cfg.rho = get_number(j, "rho", "mechanism");
    if (cfg.rho <= 0.0) fail(Err::ConfigRejected, "mechanism: rho must be > 0");
  }
  if (j.contains("inner_policy")) {
    const std::string inner = get_string(j, "inner_policy", "mechanism");
    if (inner == "ucb")
      cfg.inner.kind = PolicyKind::Ucb;
    else if (inner == "eps-greedy")
      cfg.inner.kind = PolicyKind::EpsGreedy;
    else
      fail(Err::ConfigRejected,
           "mechanism: unknown inner_policy '" + inner + "'");
  }
  if (j.contains("inner_c")) cfg.inner.c = get_number(j, "inner_c", "mechanism");
  if (j.contains("blocking"))
    cfg.blocking = get_boolean(j, "blocking", "mechanism");
  return cfg;
}

StrategyPtr checked_strategy(const json& desc, const Instance& inst, int arm,
                             const std::string& where) {
  StrategyPtr s = make_strategy(desc);
  if (arm >= 0 && inst.arms[arm].honest && !honesty_compatible(desc)) {
    std::string name = desc.value("name", std::string("?"));
    fail(Err::ConfigRejected,
         where + ": arm " + std::to_string(arm) +
             " is declared honest, so its effort can never be negative, but "
             "strategy '" + name + "' absorbs rewards");
  }
  return s;
}

Profile parse_profile(const json& j, const Instance& inst,
                      const std::string& where) {
  if (!j.is_array())
    fail(Err::ConfigRejected, where + ": expected an array of strategies");
  if (static_cast<int>(j.size()) != inst.k())
    fail(Err::ConfigRejected,
         where + ": needs exactly one strategy per arm (" +
             std::to_string(inst.k()) + ")");
  Profile profile;
  for (int i = 0; i < inst.k(); ++i)
    profile.push_back(
        checked_strategy(j[i], inst, i, where + "[" + std::to_string(i) + "]"));
  return profile;
}

std::vector<std::uint64_t> parse_seeds(const json& doc) {
  const json& j = require_key(doc, "seeds", "config");
  require_object(j, "seeds");
  reject_unknown_keys(j, {"count", "base"}, "seeds");
  std::int64_t count = get_integer(j, "count", "seeds");
  std::int64_t base = get_integer(j, "base", "seeds");
  if (count < 1) fail(Err::ConfigRejected, "seeds: count must be >= 1");
  if (base < 0) fail(Err::ConfigRejected, "seeds: base must be >= 0");
  return seed_list(static_cast<std::uint64_t>(base), static_cast<int>(count));
}

void parse_output(const json& doc, RunConfig& cfg) {
  if (!doc.contains("output")) return;
  const json& j = doc.at("output");
  require_object(j, "output");
  reject_unknown_keys(j, {"summary", "rounds"}, "output");
  if (j.contains("summary")) cfg.out_summary = get_string(j, "summary", "output");
  if (j.contains("rounds")) {
    if (cfg.experiment != "episode")
      fail(Err::ConfigRejected,
           "output: a rounds log is only produced by the episode experiment");
    cfg.out_rounds = get_string(j, "rounds", "output");
  }
}

void parse_controller(const json& doc, RunConfig& cfg, bool policy_only) {
  const bool has_policy = doc.contains("policy");
  const bool has_mech = doc.contains("mechanism");
  if (has_policy == has_mech)
    fail(Err::ConfigRejected,
         "config: exactly one of 'policy' and 'mechanism' is required");
  if (has_mech && policy_only)
    fail(Err::ConfigRejected, "config: the '" + cfg.experiment +
                                  "' experiment runs a bare policy, not the "
                                  "mechanism");
  if (has_policy)
    cfg.controller = Controller::for_policy(parse_policy(doc.at("policy")));
  else
    cfg.controller = Controller::for_mechanism(parse_mechanism(doc.at("mechanism")));
  if (cfg.controller.kind == Controller::Kind::Mechanism)
    validate_sp_pi(cfg.instance, cfg.controller.mech);
}

void parse_horizons(const json& doc, RunConfig& cfg) {
  if (!doc.contains("horizons")) return;
  const json& j = doc.at("horizons");
  if (!j.is_array() || j.empty())
    fail(Err::ConfigRejected, "horizons: expected a non-empty array");
  for (const auto& h : j) {
    if (!h.is_number_integer() || h.get<std::int64_t>() < 2)
      fail(Err::ConfigRejected, "horizons: entries must be integers >= 2");
    cfg.horizons.push_back(h.get<std::int64_t>());
  }
}

ordered_json controller_to_json(const Controller& ctrl) {
  ordered_json j;
  if (ctrl.kind == Controller::Kind::Policy) {
    if (ctrl.policy.kind == PolicyKind::Ucb) {
      j["name"] = "ucb";
      j["randomized_ties"] = ctrl.policy.randomized_ties;
    } else {
      j["name"] = "eps-greedy";
      j["c"] = ctrl.policy.c;
    }
  } else {
    j["mechanism"] = "sp_pi";
    j["rho"] = ctrl.mech.rho;
    j["inner_policy"] =
        ctrl.mech.inner.kind == PolicyKind::Ucb ? "ucb" : "eps-greedy";
    j["blocking"] = ctrl.mech.blocking;
  }
  return j;
}

ordered_json estimate_to_json(const Estimate& e) {
  return ordered_json{{"mean", e.mean}, {"half_width", e.half_width}};
}

ordered_json summary_to_json(const MonteCarloSummary& s) {
  ordered_json j;
  j["horizon"] = s.horizon;
  j["count"] = s.count;
  j["revenue"] = estimate_to_json(s.revenue);
  j["revenue_per_round"] = s.revenue_per_round;
  j["blocking_events"] = s.blocking_events;
  ordered_json arms = ordered_json::array();
  for (std::size_t i = 0; i < s.arms.size(); ++i) {
    ordered_json a;
    a["arm"] = i;
    a["pulls"] = estimate_to_json(s.arms[i].pulls);
    a["effort"] = estimate_to_json(s.arms[i].effort);
    a["utility"] = estimate_to_json(s.arms[i].utility);
    arms.push_back(a);
  }
  j["arms"] = arms;
  return j;
}

ordered_json deviation_to_json(const DeviationReport& r) {
  ordered_json j;
  j["arm"] = r.arm;
  j["baseline"] = r.baseline;
  j["deviation"] = r.deviation;
  j["base_utility"] = estimate_to_json(r.base_utility);
  j["dev_utility"] = estimate_to_json(r.dev_utility);
  j["ratio"] = r.ratio;
  j["ci"] = ordered_json::array({r.ci_lo, r.ci_hi});
  j["tau"] = r.tau;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

int select_deviation_arm(const RunConfig& cfg, int workers) {
  if (cfg.deviation_arm >= 0) return cfg.deviation_arm;
  // -1: deviate from the arm the baseline run favors least.
  MonteCarloSummary base = monte_carlo(cfg.instance, cfg.controller,
                                       cfg.profile, cfg.seeds, workers);
  int arm = 0;
  for (int i = 1; i < cfg.instance.k(); ++i)
    if (base.arms[i].pulls.mean < base.arms[arm].pulls.mean) arm = i;
  return arm;
}

struct Outcome {
  bool pass = true;
  ordered_json results;
};

Outcome do_episode(const RunConfig& cfg) {
  EpisodeOptions opt;
  opt.record_rounds = !cfg.out_rounds.empty();
  std::uint64_t seed = cfg.seeds.empty() ? cfg.instance.seed : cfg.seeds[0];
  EpisodeOutcome out = run_episode(cfg.instance, cfg.controller, cfg.profile,
                                   seed, opt);
  Outcome res;
  res.results = outcome_to_json(out);
  if (!cfg.out_rounds.empty()) {
    std::filesystem::path p(cfg.out_rounds);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) fail(Err::ConfigRejected, "output: cannot write " + cfg.out_rounds);
    f << round_log_to_csv(out);
  }
  return res;
}

Outcome do_monte_carlo(const RunConfig& cfg, int workers) {
  MonteCarloSummary s =
      monte_carlo(cfg.instance, cfg.controller, cfg.profile, cfg.seeds, workers);
  Outcome res;
  res.results = summary_to_json(s);
  if (cfg.expect_no_blocking && s.blocking_events > 0) res.pass = false;
  return res;
}

Outcome do_coupled(const RunConfig& cfg) {
  int containment_failures = 0;
  int monotone_failures = 0;
  for (std::uint64_t seed : cfg.seeds) {
    CoupledPair pair =
        coupled_replay(cfg.instance, cfg.controller, cfg.profile,
                       cfg.deviation_arm, cfg.deviation_strategy, seed);
    if (!pair.containment) ++containment_failures;
    if (!pair.counts_monotone) ++monotone_failures;
  }
  Outcome res;
  res.results["arm"] = cfg.deviation_arm;
  res.results["deviation"] = cfg.deviation_strategy->descriptor();
  res.results["seeds"] = cfg.seeds.size();
  res.results["containment_failures"] = containment_failures;
  res.results["monotone_failures"] = monotone_failures;
  res.pass = containment_failures == 0 && monotone_failures == 0;
  return res;
}

Outcome do_fata(const RunConfig& cfg, int workers) {
  FataReport r = verify_fata(cfg.instance, cfg.controller.policy, cfg.profile,
                             cfg.fata_subset, cfg.seeds, workers);
  Outcome res;
  res.results["subset"] = r.subset;
  res.results["mode"] = r.exact_mode ? "exact" : "statistical";
  if (r.exact_mode) {
    res.results["max_discrepancy"] = r.max_discrepancy;
  } else {
    res.results["max_mean_gap"] = r.max_mean_gap;
    res.results["allowed_gap"] = r.allowed_gap;
  }
  res.pass = r.pass;
  return res;
}

Outcome do_adaptivity(const RunConfig& cfg, int workers) {
  AdaptivityReport r = estimate_sharp_adaptivity(
      cfg.instance, cfg.controller.policy, cfg.profile, cfg.test_arm,
      cfg.alpha_threshold, cfg.slack_coefficient, cfg.seeds, workers);
  Outcome res;
  res.results["test_arm"] = r.test_arm;
  res.results["mean_pulls"] = r.mean_pulls;
  res.results["mean_effort"] = r.mean_effort;
  res.results["alpha_hat"] = r.alpha_hat;
  res.results["alpha_threshold"] = r.alpha_threshold;
  res.results["slack"] = r.slack;
  res.results["required_effort"] = r.required_effort;
  res.results["vacuous"] = r.vacuous;
  res.pass = r.pass;
  return res;
}

Outcome do_deviation(const RunConfig& cfg, int workers) {
  int arm = select_deviation_arm(cfg, workers);
  if (cfg.instance.arms[arm].honest &&
      !honesty_compatible(cfg.deviation_strategy->descriptor()))
    fail(Err::ConfigRejected,
         "deviation: selected arm " + std::to_string(arm) +
             " is honest and cannot absorb rewards");
  DeviationReport r =
      deviation_ratio(cfg.instance, cfg.controller, cfg.profile, arm,
                      cfg.deviation_strategy, cfg.seeds, cfg.tau, workers);
  Outcome res;
  res.results = deviation_to_json(r);
  res.pass = cfg.expect == "any" ||
             std::string(verdict_name(r.verdict)) == cfg.expect;
  return res;
}

Outcome do_regret(const RunConfig& cfg, int workers) {
  RegretReport r =
      regret_ordinary(cfg.instance, cfg.controller.policy, cfg.seeds, workers);
  Outcome res;
  res.results["best_mean"] = r.best_mean;
  res.results["revenue"] = estimate_to_json(r.revenue);
  res.results["regret"] = r.regret;
  res.results["normalized"] = r.normalized;
  if (cfg.max_normalized > 0.0) res.pass = r.normalized <= cfg.max_normalized;
  return res;
}

Outcome do_revenue_floor(const RunConfig& cfg, int workers) {
  FloorReport r =
      revenue_floor_check(cfg.instance, cfg.controller, cfg.floor_profiles,
                          cfg.slack_coefficient, cfg.seeds, workers);
  Outcome res;
  res.results["mu_h"] = r.mu_h;
  res.results["slack"] = r.slack;
  res.results["floor"] = r.floor;
  ordered_json rows = ordered_json::array();
  for (const auto& p : r.profiles) {
    ordered_json row;
    row["profile"] = p.profile;
    row["revenue_per_round"] = p.revenue_per_round;
    row["pass"] = p.pass;
    rows.push_back(row);
  }
  res.results["profiles"] = rows;
  res.results["worst"] = r.worst;
  res.pass = r.pass;
  return res;
}

Outcome do_condition(const RunConfig& cfg) {
  ConditionReport r = check_condition_5_1(cfg.instance);
  Outcome res;
  res.results["holds"] = r.holds;
  res.results["threshold"] = r.threshold;
  res.results["margin"] = r.margin;
  res.results["f2_evaluated"] = r.f2_evaluated;
  if (r.f2_evaluated) {
    res.results["f2_holds"] = r.f2_holds;
    res.results["f2_threshold"] = r.f2_threshold;
    res.results["f2_margin"] = r.f2_margin;
    res.results["k_top_cost"] = r.k_top_cost;
    res.results["maxall_cost"] = r.maxall_cost;
  }
  res.pass = (cfg.expect == "holds") == r.holds;
  return res;
}

Outcome do_mixture_check(const RunConfig& cfg) {
  const ArmSpec& spec = cfg.instance.arms[cfg.test_arm];
  const std::int64_t n = cfg.instance.horizon;
  const double m_prime = cfg.m_bar - 1.0 / std::log(static_cast<double>(n));
  MixturePlan plan = mixture_plan(spec, m_prime, n);

  RewardTape tape{cfg.instance.seed, spec.id};
  long double delivered_sum = 0.0L;
  double min_effort = 0.0;
  for (std::int64_t j = 1; j <= cfg.mixture_pulls; ++j) {
    double raw = sample_raw(tape, spec, j);
    double coin = rng::u01(cfg.instance.seed, rng::strategy_stream(spec.id),
                           rng::strategy_index(j, 0));
    double effort = mixture_effort(spec, plan, raw, coin);
    min_effort = std::min(min_effort, effort);
    delivered_sum += raw + effort;
  }
  double empirical =
      static_cast<double>(delivered_sum / static_cast<long double>(cfg.mixture_pulls));
  double exact = mixture_exact_mean(spec, plan);

  Outcome res;
  res.results["m_bar"] = plan.m_bar;
  res.results["case"] = plan.lift_upper_only ? "lift-upper-only" : "lift-both";
  res.results["lift_prob"] = plan.lift_prob;
  res.results["pulls"] = cfg.mixture_pulls;
  res.results["empirical_mean"] = empirical;
  res.results["exact_mean"] = exact;
  res.results["min_effort"] = min_effort;
  res.results["tolerance"] = cfg.mixture_tolerance;
  bool mean_ok = std::abs(empirical - plan.m_bar) <= cfg.mixture_tolerance;
  bool exact_ok = std::abs(exact - plan.m_bar) <= 1e-12;
  bool effort_ok = min_effort >= -effort_tolerance;
  res.results["empirical_within_tolerance"] = mean_ok;
  res.results["exact_matches"] = exact_ok;
  res.results["efforts_nonnegative"] = effort_ok;
  res.pass = mean_ok && exact_ok && effort_ok;
  return res;
}

Outcome do_blocking_necessity(const RunConfig& cfg, int workers) {
  Controller on = cfg.controller;
  on.mech.blocking = true;
  Controller off = cfg.controller;
  off.mech.blocking = false;

  DeviationReport blocked =
      deviation_ratio(cfg.instance, on, cfg.profile, cfg.deviation_arm,
                      cfg.deviation_strategy, cfg.seeds, cfg.tau, workers);

  Profile deviated = cfg.profile;
  deviated[cfg.deviation_arm] = cfg.deviation_strategy;
  MonteCarloSummary dev_runs =
      monte_carlo(cfg.instance, on, deviated, cfg.seeds, workers);
  double dev_pulls = dev_runs.arms[cfg.deviation_arm].pulls.mean;
  double log_n = std::log(static_cast<double>(cfg.instance.horizon));
  double pulls_bound =
      cfg.pulls_bound_coefficient * std::pow(log_n, on.mech.rho + 3.0);

  DeviationReport open =
      deviation_ratio(cfg.instance, off, cfg.profile, cfg.deviation_arm,
                      cfg.deviation_strategy, cfg.seeds, cfg.tau, workers);

  Outcome res;
  ordered_json b = deviation_to_json(blocked);
  b["dev_pulls_mean"] = dev_pulls;
  b["pulls_bound"] = pulls_bound;
  b["blocking_events"] = dev_runs.blocking_events;
  res.results["blocked"] = b;
  res.results["unblocked"] = deviation_to_json(open);
  bool blocked_ok = blocked.verdict == Verdict::NotProfitable &&
                    dev_pulls <= pulls_bound;
  bool open_ok = open.verdict == Verdict::Profitable;
  res.results["blocked_ok"] = blocked_ok;
  res.results["unblocked_profitable"] = open_ok;
  res.pass = blocked_ok && open_ok;
  return res;
}

void write_summary(const RunConfig& cfg, const ordered_json& summary) {
  std::string text = summary.dump(2);
  std::printf("%s\n", text.c_str());
  if (cfg.out_summary.empty()) return;
  std::filesystem::path p(cfg.out_summary);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) fail(Err::ConfigRejected, "output: cannot write " + cfg.out_summary);
  f << text << '\n';
}

double trend_metric(const std::string& experiment, const ordered_json& results,
                    bool& found) {
  found = true;
  if (experiment == "regret") return results.at("normalized").get<double>();
  if (experiment == "deviation") return results.at("ratio").get<double>();
  if (experiment == "monte-carlo")
    return results.at("revenue_per_round").get<double>();
  if (experiment == "revenue-floor") {
    int worst = results.at("worst").get<int>();
    return results.at("profiles")[worst]["revenue_per_round"].get<double>();
  }
  found = false;
  return 0.0;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  require_object(doc, "config");
  RunConfig cfg;
  cfg.raw = doc;
  cfg.experiment = get_string(doc, "experiment", "config");
  if (!kExperiments.count(cfg.experiment)) {
    std::string names;
    for (const auto& e : kExperiments) names += (names.empty() ? "" : ", ") + e;
    fail(Err::ConfigRejected,
         "config: unknown experiment '" + cfg.experiment + "' (" + names + ")");
  }

  if (cfg.experiment == "scenario") {
    reject_unknown_keys(doc, {"experiment", "scenario", "seeds", "workers", "output"},
                        "config");
    json expanded = scenario_config(get_string(doc, "scenario", "config"));
    if (doc.contains("seeds")) expanded["seeds"] = doc.at("seeds");
    if (doc.contains("workers")) expanded["workers"] = doc.at("workers");
    if (doc.contains("output")) expanded["output"] = doc.at("output");
    return parse_run_config(expanded);
  }

  cfg.instance = build_instance(require_key(doc, "instance", "config"));

  if (doc.contains("workers")) {
    std::int64_t w = get_integer(doc, "workers", "config");
    if (w < 0) fail(Err::ConfigRejected, "workers: must be >= 0");
    cfg.workers = static_cast<int>(w);
  }
  parse_output(doc, cfg);
  parse_horizons(doc, cfg);

  auto parse_deviation_block = [&](bool allow_auto) {
    const json& d = require_key(doc, "deviation", "config");
    require_object(d, "deviation");
    reject_unknown_keys(d, {"arm", "strategy"}, "deviation");
    std::int64_t arm = get_integer(d, "arm", "deviation");
    int lo = allow_auto ? -1 : 0;
    if (arm < lo || arm >= cfg.instance.k())
      fail(Err::ConfigRejected, "deviation: arm out of range");
    cfg.deviation_arm = static_cast<int>(arm);
    cfg.deviation_strategy =
        checked_strategy(require_key(d, "strategy", "deviation"), cfg.instance,
                         cfg.deviation_arm, "deviation.strategy");
  };

  const std::string& e = cfg.experiment;
  if (e == "episode") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "mechanism",
                         "profile", "seeds", "workers", "output"},
                        "config");
    parse_controller(doc, cfg, false);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    if (doc.contains("seeds")) {
      cfg.seeds = parse_seeds(doc);
      if (cfg.seeds.size() != 1)
        fail(Err::ConfigRejected,
             "seeds: an episode is a single run; use count 1 or drop seeds");
    }
  } else if (e == "monte-carlo") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "mechanism",
                         "profile", "seeds", "workers", "output",
                         "expect_no_blocking", "horizons"},
                        "config");
    parse_controller(doc, cfg, false);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    cfg.seeds = parse_seeds(doc);
    if (doc.contains("expect_no_blocking"))
      cfg.expect_no_blocking = get_boolean(doc, "expect_no_blocking", "config");
  } else if (e == "coupled") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "mechanism",
                         "profile", "deviation", "seeds", "workers", "output"},
                        "config");
    parse_controller(doc, cfg, false);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    parse_deviation_block(false);
    cfg.seeds = parse_seeds(doc);
  } else if (e == "fata") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "profile", "fata",
                         "seeds", "workers", "output"},
                        "config");
    parse_controller(doc, cfg, true);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    const json& f = require_key(doc, "fata", "config");
    require_object(f, "fata");
    reject_unknown_keys(f, {"subset"}, "fata");
    const json& subset = require_key(f, "subset", "fata");
    if (!subset.is_array())
      fail(Err::ConfigRejected, "fata: subset must be an array of arm ids");
    for (const auto& a : subset) {
      if (!a.is_number_integer() || a.get<std::int64_t>() < 0 ||
          a.get<std::int64_t>() >= cfg.instance.k())
        fail(Err::ConfigRejected, "fata: subset arm out of range");
      cfg.fata_subset.push_back(a.get<int>());
    }
    cfg.seeds = parse_seeds(doc);
  } else if (e == "sharp-adaptivity") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "profile",
                         "adaptivity", "slack_coefficient", "seeds", "workers",
                         "output"},
                        "config");
    parse_controller(doc, cfg, true);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    const json& a = require_key(doc, "adaptivity", "config");
    require_object(a, "adaptivity");
    reject_unknown_keys(a, {"test_arm", "alpha_threshold"}, "adaptivity");
    std::int64_t arm = get_integer(a, "test_arm", "adaptivity");
    if (arm < 0 || arm >= cfg.instance.k())
      fail(Err::ConfigRejected, "adaptivity: test_arm out of range");
    cfg.test_arm = static_cast<int>(arm);
    if (a.contains("alpha_threshold")) {
      cfg.alpha_threshold = get_number(a, "alpha_threshold", "adaptivity");
      if (cfg.alpha_threshold <= 0.0 || cfg.alpha_threshold > 1.0)
        fail(Err::ConfigRejected, "adaptivity: alpha_threshold in (0, 1]");
    }
    if (doc.contains("slack_coefficient"))
      cfg.slack_coefficient = get_number(doc, "slack_coefficient", "config");
    cfg.seeds = parse_seeds(doc);
  } else if (e == "deviation") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "mechanism",
                         "profile", "deviation", "tau", "seeds", "workers",
                         "output", "expect", "horizons"},
                        "config");
    parse_controller(doc, cfg, false);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    parse_deviation_block(true);
    if (doc.contains("tau")) {
      cfg.tau = get_number(doc, "tau", "config");
      if (cfg.tau < 0.0) fail(Err::ConfigRejected, "tau: must be >= 0");
    }
    cfg.expect = "not-profitable";
    if (doc.contains("expect")) cfg.expect = get_string(doc, "expect", "config");
    if (cfg.expect != "profitable" && cfg.expect != "not-profitable" &&
        cfg.expect != "indeterminate" && cfg.expect != "any")
      fail(Err::ConfigRejected,
           "expect: profitable | not-profitable | indeterminate | any");
    cfg.seeds = parse_seeds(doc);
  } else if (e == "regret") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "seeds", "workers",
                         "output", "horizons", "max_normalized",
                         "ladder_ratio_bound"},
                        "config");
    parse_controller(doc, cfg, true);
    if (doc.contains("max_normalized")) {
      cfg.max_normalized = get_number(doc, "max_normalized", "config");
      if (cfg.max_normalized <= 0.0)
        fail(Err::ConfigRejected, "max_normalized: must be > 0");
    }
    if (doc.contains("ladder_ratio_bound")) {
      cfg.ladder_ratio_bound = get_number(doc, "ladder_ratio_bound", "config");
      if (cfg.ladder_ratio_bound <= 1.0)
        fail(Err::ConfigRejected, "ladder_ratio_bound: must be > 1");
    }
    cfg.seeds = parse_seeds(doc);
  } else if (e == "revenue-floor") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "policy", "mechanism",
                         "floor_profiles", "slack_coefficient", "seeds",
                         "workers", "output", "horizons"},
                        "config");
    parse_controller(doc, cfg, false);
    const json& fp = require_key(doc, "floor_profiles", "config");
    if (!fp.is_array() || fp.empty())
      fail(Err::ConfigRejected,
           "floor_profiles: expected a non-empty array of profiles");
    for (std::size_t i = 0; i < fp.size(); ++i)
      cfg.floor_profiles.push_back(parse_profile(
          fp[i], cfg.instance, "floor_profiles[" + std::to_string(i) + "]"));
    if (doc.contains("slack_coefficient"))
      cfg.slack_coefficient = get_number(doc, "slack_coefficient", "config");
    cfg.seeds = parse_seeds(doc);
  } else if (e == "condition") {
    reject_unknown_keys(doc, {"experiment", "instance", "expect", "output"},
                        "config");
    cfg.expect = "holds";
    if (doc.contains("expect")) cfg.expect = get_string(doc, "expect", "config");
    if (cfg.expect != "holds" && cfg.expect != "fails")
      fail(Err::ConfigRejected, "expect: holds | fails");
  } else if (e == "mixture-check") {
    reject_unknown_keys(doc, {"experiment", "instance", "mixture", "output"},
                        "config");
    const json& m = require_key(doc, "mixture", "config");
    require_object(m, "mixture");
    reject_unknown_keys(m, {"test_arm", "m_bar", "pulls", "tolerance"},
                        "mixture");
    std::int64_t arm = get_integer(m, "test_arm", "mixture");
    if (arm < 0 || arm >= cfg.instance.k())
      fail(Err::ConfigRejected, "mixture: test_arm out of range");
    cfg.test_arm = static_cast<int>(arm);
    cfg.m_bar = get_number(m, "m_bar", "mixture");
    cfg.mixture_pulls = get_integer(m, "pulls", "mixture");
    if (cfg.mixture_pulls < 1)
      fail(Err::ConfigRejected, "mixture: pulls must be >= 1");
    if (m.contains("tolerance")) {
      cfg.mixture_tolerance = get_number(m, "tolerance", "mixture");
      if (cfg.mixture_tolerance <= 0.0)
        fail(Err::ConfigRejected, "mixture: tolerance must be > 0");
    }
  } else if (e == "blocking-necessity") {
    reject_unknown_keys(doc,
                        {"experiment", "instance", "mechanism", "profile",
                         "deviation", "tau", "seeds", "workers", "output",
                         "pulls_bound_coefficient"},
                        "config");
    if (!doc.contains("mechanism"))
      fail(Err::ConfigRejected,
           "config: blocking-necessity compares the mechanism with and "
           "without blocking, so 'mechanism' is required");
    parse_controller(doc, cfg, false);
    cfg.profile = parse_profile(require_key(doc, "profile", "config"),
                                cfg.instance, "profile");
    parse_deviation_block(false);
    if (doc.contains("tau")) cfg.tau = get_number(doc, "tau", "config");
    if (doc.contains("pulls_bound_coefficient"))
      cfg.pulls_bound_coefficient =
          get_number(doc, "pulls_bound_coefficient", "config");
    cfg.seeds = parse_seeds(doc);
  }

  return cfg;
}

int resolve_workers(int configured) {
  const char* env = std::getenv("STRAT_BANDIT_WORKERS");
  if (env == nullptr || *env == '\0') return configured;
  char* end = nullptr;
  long cap = std::strtol(env, &end, 10);
  if (end == env || cap < 1) return configured;
  if (configured <= 0) return static_cast<int>(cap);
  return std::min(configured, static_cast<int>(cap));
}

RunResult execute(const RunConfig& cfg) {
  int workers = resolve_workers(cfg.workers);
  Outcome out;
  if (cfg.experiment == "episode")
    out = do_episode(cfg);
  else if (cfg.experiment == "monte-carlo")
    out = do_monte_carlo(cfg, workers);
  else if (cfg.experiment == "coupled")
    out = do_coupled(cfg);
  else if (cfg.experiment == "fata")
    out = do_fata(cfg, workers);
  else if (cfg.experiment == "sharp-adaptivity")
    out = do_adaptivity(cfg, workers);
  else if (cfg.experiment == "deviation")
    out = do_deviation(cfg, workers);
  else if (cfg.experiment == "regret")
    out = do_regret(cfg, workers);
  else if (cfg.experiment == "revenue-floor")
    out = do_revenue_floor(cfg, workers);
  else if (cfg.experiment == "condition")
    out = do_condition(cfg);
  else if (cfg.experiment == "mixture-check")
    out = do_mixture_check(cfg);
  else if (cfg.experiment == "blocking-necessity")
    out = do_blocking_necessity(cfg, workers);
  else
    fail(Err::ConfigRejected, "config: unhandled experiment " + cfg.experiment);

  RunResult res;
  res.summary["experiment"] = cfg.experiment;
  res.summary["instance"] = instance_to_json(cfg.instance);
  if (cfg.experiment != "condition" && cfg.experiment != "mixture-check")
    res.summary["controller"] = controller_to_json(cfg.controller);
  if (!cfg.seeds.empty()) {
    res.summary["seeds"] =
        ordered_json{{"count", cfg.seeds.size()}, {"base", cfg.seeds[0]}};
  }
  res.summary["results"] = out.results;
  res.summary["verdict"] = out.pass ? "pass" : "fail";
  res.exit_code = out.pass ? 0 : 1;
  return res;
}

RunResult execute_sweep(const RunConfig& cfg) {
  if (cfg.horizons.empty())
    fail(Err::ConfigRejected,
         "sweep: the config needs a non-empty 'horizons' array");
  if (cfg.horizons.size() == 1) {
    json doc = cfg.raw;
    doc["instance"]["horizon"] = cfg.horizons[0];
    doc.erase("horizons");
    return execute(parse_run_config(doc));
  }
  bool found_metric = true;
  std::vector<double> metrics;
  ordered_json runs = ordered_json::array();
  ordered_json trend = ordered_json::array();
  bool all_pass = true;

  for (std::int64_t h : cfg.horizons) {
    json doc = cfg.raw;
    doc["instance"]["horizon"] = h;
    doc.erase("horizons");
    RunConfig sub = parse_run_config(doc);
    RunResult r = execute(sub);
    all_pass = all_pass && r.exit_code == 0;
    runs.push_back(r.summary);
    bool found = false;
    double metric = trend_metric(cfg.experiment, r.summary["results"], found);
    found_metric = found_metric && found;
    if (found) {
      metrics.push_back(metric);
      trend.push_back(ordered_json{{"horizon", h}, {"metric", metric}});
    }
  }

  RunResult res;
  res.summary["experiment"] = "sweep:" + cfg.experiment;
  res.summary["horizons"] = cfg.horizons;
  res.summary["trend"] = trend;
  bool ladder_ok = true;
  if (cfg.experiment == "regret" && found_metric && metrics.size() > 1) {
    double lo = *std::min_element(metrics.begin(), metrics.end());
    double hi = *std::max_element(metrics.begin(), metrics.end());
    double ratio = lo > 0.0 ? hi / lo
                            : std::numeric_limits<double>::infinity();
    res.summary["ladder_ratio"] = ratio;
    res.summary["ladder_ratio_bound"] = cfg.ladder_ratio_bound;
    ladder_ok = ratio < cfg.ladder_ratio_bound;
  }
  res.summary["runs"] = runs;
  bool pass = all_pass && ladder_ok;
  res.summary["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? 0 : 1;
  return res;
}

namespace {

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Err::ConfigParse, "cannot read config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(Err::ConfigParse, std::string("config is not valid JSON: ") + e.what());
  }
  return doc;
}

int run_impl(const std::string& config_path, bool sweep) {
  try {
    RunConfig cfg = parse_run_config(load_config(config_path));
    RunResult res = sweep ? execute_sweep(cfg) : execute(cfg);
    write_summary(cfg, res.summary);
    return res.exit_code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int run(const std::string& config_path) { return run_impl(config_path, false); }

int run_sweep(const std::string& config_path) {
  return run_impl(config_path, true);
}

}  // namespace stratband
