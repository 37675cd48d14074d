#include "stratband/scenarios.hpp"

#include <utility>

#include "stratband/errors.hpp"

namespace stratband {

namespace {

ordered_json sb_arm(double mean, double cap, bool honest, double a = 1.0) {
  ordered_json arm;
  arm["mean"] = mean;
  arm["cap"] = cap;
  arm["honest"] = honest;
  arm["distribution"] = ordered_json{{"kind", "scaled-bernoulli"}};
  arm["cost_coefficient"] = a;
  return arm;
}

ordered_json discrete_arm(double mean, double cap, bool honest, double a,
                          std::initializer_list<std::pair<double, double>> atoms) {
  ordered_json arm;
  arm["mean"] = mean;
  arm["cap"] = cap;
  arm["honest"] = honest;
  ordered_json list = ordered_json::array();
  for (const auto& [value, prob] : atoms)
    list.push_back(ordered_json{{"value", value}, {"prob", prob}});
  arm["distribution"] = ordered_json{{"kind", "discrete"}, {"atoms", list}};
  arm["cost_coefficient"] = a;
  return arm;
}

ordered_json instance_doc(std::int64_t horizon, std::uint64_t seed,
                          std::initializer_list<ordered_json> arms) {
  ordered_json inst;
  inst["horizon"] = horizon;
  inst["arms"] = ordered_json::array();
  for (const auto& a : arms) inst["arms"].push_back(a);
  inst["seed"] = seed;
  return inst;
}

ordered_json strat(const char* name) { return ordered_json{{"name", name}}; }

ordered_json seeds_doc(int count, std::uint64_t base) {
  return ordered_json{{"count", count}, {"base", base}};
}

ordered_json ucb() {
  return ordered_json{{"name", "ucb"}};
}

ordered_json eps_greedy(double c) {
  return ordered_json{{"name", "eps-greedy"}, {"c", c}};
}

ordered_json sp_pi(double rho) {
  return ordered_json{
      {"mechanism", "sp_pi"}, {"rho", rho}, {"inner_policy", "ucb"}};
}

struct Preset {
  const char* name;
  const char* summary;
  ordered_json (*make)();
};

ordered_json preset_robustness() {
  ordered_json cfg;
  cfg["experiment"] = "revenue-floor";
  cfg["instance"] = instance_doc(100000, 42,
                                 {sb_arm(0.6, 1.0, true), sb_arm(0.5, 1.0, false),
                                  sb_arm(0.5, 1.0, false)});
  cfg["policy"] = ucb();
  ordered_json mimic{{"name", "mimic_then_absorb"},
                     {"level", 0.65},
                     {"switch_pulls", 25000}};
  ordered_json hold{{"name", "constant_target"}, {"level", 0.5}};
  cfg["floor_profiles"] = ordered_json::array(
      {ordered_json::array(
           {strat("honest_passive"), strat("absorb_all"), strat("absorb_all")}),
       ordered_json::array({strat("honest_passive"), mimic, mimic}),
       ordered_json::array({strat("honest_passive"), hold, hold})});
  cfg["slack_coefficient"] = 4.0;
  cfg["seeds"] = seeds_doc(200, 1);
  return cfg;
}

ordered_json preset_ucb_fata() {
  ordered_json cfg;
  cfg["experiment"] = "fata";
  cfg["instance"] = instance_doc(
      10000, 7, {sb_arm(0.45, 0.9, true), sb_arm(0.45, 0.9, true)});
  cfg["policy"] = ucb();
  ordered_json deliver{{"name", "constant_target"}, {"level", 0.9}};
  cfg["profile"] = ordered_json::array({deliver, deliver});
  cfg["fata"] = ordered_json{{"subset", ordered_json::array({0, 1})}};
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json monotone_body(ordered_json policy) {
  ordered_json cfg;
  cfg["experiment"] = "coupled";
  cfg["instance"] = instance_doc(20000, 11,
                                 {sb_arm(0.5, 1.0, false), sb_arm(0.5, 0.8, true),
                                  sb_arm(0.4, 0.7, true)});
  cfg["policy"] = std::move(policy);
  cfg["profile"] = ordered_json::array({strat("honest_passive"),
                                        strat("honest_passive"),
                                        strat("honest_passive")});
  cfg["deviation"] =
      ordered_json{{"arm", 0}, {"strategy", strat("top_performance")}};
  cfg["seeds"] = seeds_doc(200, 1);
  return cfg;
}

ordered_json preset_ucb_monotone() { return monotone_body(ucb()); }

ordered_json preset_eps_monotone() { return monotone_body(eps_greedy(2.0)); }

ordered_json preset_eps_regret() {
  ordered_json cfg;
  cfg["experiment"] = "regret";
  cfg["instance"] = instance_doc(
      10000, 3, {sb_arm(0.7, 1.0, true), sb_arm(0.4, 1.0, true)});
  cfg["policy"] = eps_greedy(2.0);
  cfg["horizons"] = ordered_json::array({10000, 40000, 160000});
  cfg["ladder_ratio_bound"] = 2.0;
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json preset_top_equilibrium() {
  ordered_json cfg;
  cfg["experiment"] = "deviation";
  cfg["instance"] = instance_doc(100000, 5,
                                 {sb_arm(0.7, 0.9, true), sb_arm(0.7, 0.9, false),
                                  sb_arm(0.7, 0.9, false), sb_arm(0.4, 0.5, true)});
  cfg["policy"] = ucb();
  cfg["profile"] = ordered_json::array(
      {strat("top_performance"), strat("top_performance"),
       strat("top_performance"), strat("honest_passive")});
  cfg["deviation"] =
      ordered_json{{"arm", 1}, {"strategy", strat("honest_passive")}};
  cfg["tau"] = 0.05;
  cfg["expect"] = "not-profitable";
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json preset_condition_check() {
  ordered_json cfg;
  cfg["experiment"] = "condition";
  cfg["instance"] = instance_doc(1000, 1,
                                 {sb_arm(0.9, 1.0, true), sb_arm(0.9, 1.0, true),
                                  sb_arm(0.9, 1.0, true), sb_arm(0.9, 1.0, true)});
  cfg["expect"] = "holds";
  return cfg;
}

ordered_json remark_instance(double top_cap) {
  // Degenerate raws: each arm pays out exactly its mean on every pull, so the
  // honest arms can always reach an inner-phase target that sits above 0.1
  // without the nonnegative-effort constraint ever binding.
  return instance_doc(100000, 9,
                      {discrete_arm(0.1, top_cap, false, 1.0, {{0.1, 1.0}}),
                       discrete_arm(0.1, 0.8, true, 1.0, {{0.1, 1.0}}),
                       discrete_arm(0.1, 0.3, true, 1.0, {{0.1, 1.0}})});
}

ordered_json preset_sp_pi_equilibrium() {
  ordered_json cfg;
  cfg["experiment"] = "monte-carlo";
  cfg["instance"] = remark_instance(1.0);
  cfg["mechanism"] = sp_pi(1.0);
  cfg["profile"] = ordered_json::array({strat("sp_pi_equilibrium"),
                                        strat("sp_pi_equilibrium"),
                                        strat("sp_pi_equilibrium")});
  cfg["expect_no_blocking"] = true;
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json blocking_body(double top_cap) {
  ordered_json cfg;
  cfg["experiment"] = "blocking-necessity";
  cfg["instance"] = remark_instance(top_cap);
  cfg["mechanism"] = sp_pi(1.0);
  cfg["profile"] = ordered_json::array({strat("sp_pi_equilibrium"),
                                        strat("sp_pi_equilibrium"),
                                        strat("sp_pi_equilibrium")});
  // Bidding 0.1 drags m' down to 0.3; the cap-0.8 rival then plays to
  // 0.3 + 1/ln(n) < 0.4, so delivering 0.4 wins pulls at a fraction of the
  // equilibrium effort unless the blocking rule removes the arm.
  ordered_json undercut{{"name", "sp_pi_fixed_play"}, {"bid", 0.1}, {"level", 0.4}};
  cfg["deviation"] = ordered_json{{"arm", 0}, {"strategy", undercut}};
  cfg["tau"] = 0.05;
  cfg["pulls_bound_coefficient"] = 2.0;
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json preset_blocking() { return blocking_body(1.0); }

ordered_json preset_blocking_equal_caps() { return blocking_body(0.8); }

ordered_json preset_mixture() {
  ordered_json cfg;
  cfg["experiment"] = "mixture-check";
  cfg["instance"] = instance_doc(
      100000, 13,
      {discrete_arm(0.575, 1.0, true, 1.0, {{0.2, 0.5}, {0.95, 0.5}}),
       sb_arm(0.1, 0.3, true)});
  cfg["mixture"] = ordered_json{{"test_arm", 0},
                                {"m_bar", 0.9},
                                {"pulls", 1000000},
                                {"tolerance", 0.002}};
  return cfg;
}

ordered_json preset_non_dominance() {
  ordered_json cfg;
  cfg["experiment"] = "deviation";
  cfg["instance"] = instance_doc(
      100000, 17, {sb_arm(0.6, 1.0, true), sb_arm(0.5, 1.0, true)});
  cfg["policy"] = ucb();
  cfg["profile"] =
      ordered_json::array({strat("top_performance"), strat("honest_passive")});
  cfg["deviation"] =
      ordered_json{{"arm", 0}, {"strategy", strat("honest_passive")}};
  cfg["tau"] = 0.3;
  cfg["expect"] = "profitable";
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

ordered_json preset_unsustainable() {
  ordered_json cfg;
  cfg["experiment"] = "deviation";
  cfg["instance"] = instance_doc(
      100000, 23, {sb_arm(0.5, 1.0, false, 4.0), sb_arm(0.5, 0.7, true)});
  cfg["policy"] = eps_greedy(2.0);
  ordered_json hold{{"name", "constant_target"}, {"level", 0.7}};
  cfg["profile"] = ordered_json::array({hold, hold});
  ordered_json nudge{
      {"name", "first_pull_overshoot"}, {"first", 1.0}, {"then", 0.705}};
  cfg["deviation"] = ordered_json{{"arm", 0}, {"strategy", nudge}};
  cfg["tau"] = 0.5;
  cfg["expect"] = "profitable";
  cfg["seeds"] = seeds_doc(200, 1);
  return cfg;
}

ordered_json preset_capture_deviation() {
  ordered_json cfg;
  cfg["experiment"] = "deviation";
  cfg["instance"] = instance_doc(100000, 29,
                                 {sb_arm(0.9, 1.0, true), sb_arm(0.9, 1.0, true),
                                  sb_arm(0.9, 1.0, true), sb_arm(0.9, 1.0, true)});
  cfg["policy"] = ucb();
  cfg["profile"] = ordered_json::array(
      {strat("honest_passive"), strat("honest_passive"),
       strat("honest_passive"), strat("honest_passive")});
  cfg["deviation"] =
      ordered_json{{"arm", -1}, {"strategy", strat("top_performance")}};
  cfg["tau"] = 0.05;
  cfg["expect"] = "profitable";
  cfg["seeds"] = seeds_doc(100, 1);
  return cfg;
}

const Preset kPresets[] = {
    {"thm-4.2-robustness",
     "revenue floor held against absorbing, mimicking, and low-balling arms",
     preset_robustness},
    {"thm-A.2-ucb-fata",
     "two arms delivering one constant get pull counts within 1 of each other",
     preset_ucb_fata},
    {"thm-A.1-ucb-monotone",
     "raising one arm's deliveries never adds pulls to any other arm (ucb)",
     preset_ucb_monotone},
    {"thm-B.1-eps-regret",
     "eps-greedy regret stays near its n^(2/3) scaling across a horizon ladder",
     preset_eps_regret},
    {"thm-5.4-top-equilibrium",
     "dropping out of the all-top-performance profile is not profitable",
     preset_top_equilibrium},
    {"cond-5.1-check",
     "competition condition and its cost-adjusted variant on a 4-arm instance",
     preset_condition_check},
    {"thm-6.1-sp-pi-equilibrium",
     "auction equilibrium profile runs with zero blocking events",
     preset_sp_pi_equilibrium},
    {"remark-6.1-blocking",
     "bid-undercutting pays off exactly when blocking is disabled",
     preset_blocking},
    {"remark-6.1-blocking-equal-caps",
     "same undercutting comparison when the two top caps are equal",
     preset_blocking_equal_caps},
    {"appendix-D-mixture",
     "randomized lift plan delivers the target mean with nonnegative effort",
     preset_mixture},
    {"appendix-E-non-dominance",
     "passive play beats top-performance play against a weaker rival",
     preset_non_dominance},
    {"thm-F.3-unsustainable",
     "an arm with a cheap rival cap nudges above it and profits (eps-greedy)",
     preset_unsustainable},
    {"thm-5.3-deviation",
     "under a sub-optimal passive profile the least-pulled arm profits by "
     "capturing",
     preset_capture_deviation},
    {"thm-B.3-eps-monotone",
     "raising one arm's deliveries never adds pulls to any other arm "
     "(eps-greedy)",
     preset_eps_monotone},
};

const Preset* find_preset(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return &p;
  return nullptr;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.push_back(p.name);
  return names;
}

ordered_json scenario_config(const std::string& name) {
  const Preset* p = find_preset(name);
  if (p == nullptr) {
    std::string known;
    for (const auto& q : kPresets)
      known += (known.empty() ? "" : ", ") + std::string(q.name);
    fail(Err::UnknownScenario,
         "unknown scenario '" + name + "'; available: " + known);
  }
  return p->make();
}

std::string scenario_summary(const std::string& name) {
  const Preset* p = find_preset(name);
  if (p == nullptr) return "";
  return p->summary;
}

}  // namespace stratband
