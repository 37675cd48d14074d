#include "stratband/strategies.hpp"

#include <cmath>
#include <limits>

#include "stratband/serialize.hpp"

namespace stratband {

namespace {

// Phase detection from the arm's own view. Before any broadcast the arm is
// bidding; the second-bid broadcast opens the main phase; the reward-phase
// broadcast closes it. A second pull without any broadcast means the arm is
// not running under the auction mechanism at all.
enum class SeenPhase { Bidding, Main, Reward };

SeenPhase seen_phase(const OwnHistory& h, double& m_prime) {
  if (const Announcement* a = h.find(announce_second_bid)) {
    m_prime = a->value;
    return h.find(announce_reward_phase) ? SeenPhase::Reward : SeenPhase::Main;
  }
  if (h.own_pull_count >= 1)
    fail(Err::MissingAnnouncement,
         "auction strategy pulled again without a second-bid broadcast; "
         "is it running under the right mechanism?");
  return SeenPhase::Bidding;
}

struct HonestPassive final : Strategy {
  double effort(const ArmSpec&, std::int64_t, const OwnHistory&, double,
                rng::Stream&) const override {
    return 0.0;
  }
  ordered_json descriptor() const override {
    return {{"name", "honest_passive"}};
  }
};

struct TopPerformance final : Strategy {
  double effort(const ArmSpec& spec, std::int64_t, const OwnHistory&,
                double raw, rng::Stream&) const override {
    return spec.cap - raw;
  }
  ordered_json descriptor() const override {
    return {{"name", "top_performance"}};
  }
};

struct AbsorbAll final : Strategy {
  double effort(const ArmSpec&, std::int64_t, const OwnHistory&, double raw,
                rng::Stream&) const override {
    return -raw;
  }
  ordered_json descriptor() const override { return {{"name", "absorb_all"}}; }
};

struct ConstantTarget final : Strategy {
  double level;
  explicit ConstantTarget(double l) : level(l) {}
  double effort(const ArmSpec& spec, std::int64_t, const OwnHistory&,
                double raw, rng::Stream&) const override {
    double e = level - raw;
    // Honest arms pass through any draw that already beats the target.
    if (spec.honest && e < 0.0) e = 0.0;
    return e;
  }
  ordered_json descriptor() const override {
    return {{"name", "constant_target"}, {"level", level}};
  }
};

struct MimicThenAbsorb final : Strategy {
  double level;
  std::int64_t switch_pulls;
  MimicThenAbsorb(double l, std::int64_t s) : level(l), switch_pulls(s) {}
  double effort(const ArmSpec&, std::int64_t, const OwnHistory& h, double raw,
                rng::Stream&) const override {
    return h.own_pull_count < switch_pulls ? level - raw : -raw;
  }
  ordered_json descriptor() const override {
    return {{"name", "mimic_then_absorb"},
            {"level", level},
            {"switch_pulls", switch_pulls}};
  }
};

struct FirstPullOvershoot final : Strategy {
  double first, then_level;
  FirstPullOvershoot(double f, double t) : first(f), then_level(t) {}
  double effort(const ArmSpec& spec, std::int64_t, const OwnHistory& h,
                double raw, rng::Stream&) const override {
    double e = (h.own_pull_count == 0 ? first : then_level) - raw;
    if (spec.honest && e < 0.0) e = 0.0;
    return e;
  }
  ordered_json descriptor() const override {
    return {{"name", "first_pull_overshoot"},
            {"first", first},
            {"then", then_level}};
  }
};

struct SpPiEquilibrium final : Strategy {
  double effort(const ArmSpec& spec, std::int64_t horizon, const OwnHistory& h,
                double raw, rng::Stream&) const override {
    double m_prime = 0.0;
    switch (seen_phase(h, m_prime)) {
      case SeenPhase::Bidding:
        return spec.cap - raw;  // truthful bid
      case SeenPhase::Main: {
        double target = spec.cap;
        if (spec.cap > m_prime + effort_tolerance)
          target = std::min(
              spec.cap,
              m_prime + 1.0 / std::log(static_cast<double>(horizon)));
        double e = target - raw;
        // An honest arm cannot absorb down to the target; it passes the
        // raw draw through whenever the draw already exceeds it.
        if (spec.honest && e < 0.0) e = 0.0;
        return e;
      }
      case SeenPhase::Reward:
        return spec.honest ? 0.0 : -raw;
    }
    return 0.0;
  }
  ordered_json descriptor() const override {
    return {{"name", "sp_pi_equilibrium"}};
  }
};

struct SpPiFixedPlay final : Strategy {
  double bid, level;
  SpPiFixedPlay(double b, double l) : bid(b), level(l) {}
  double effort(const ArmSpec& spec, std::int64_t, const OwnHistory& h,
                double raw, rng::Stream&) const override {
    double m_prime = 0.0;
    switch (seen_phase(h, m_prime)) {
      case SeenPhase::Bidding: return bid - raw;
      case SeenPhase::Main: return level - raw;
      case SeenPhase::Reward: return spec.honest ? 0.0 : -raw;
    }
    return 0.0;
  }
  ordered_json descriptor() const override {
    return {{"name", "sp_pi_fixed_play"}, {"bid", bid}, {"level", level}};
  }
};

struct HonestTopMixture final : Strategy {
  double effort(const ArmSpec& spec, std::int64_t horizon, const OwnHistory& h,
                double raw, rng::Stream& coin) const override {
    double m_prime = 0.0;
    switch (seen_phase(h, m_prime)) {
      case SeenPhase::Bidding:
        return spec.cap - raw;  // truthful bid
      case SeenPhase::Main: {
        const MixturePlan plan = mixture_plan(spec, m_prime, horizon);
        return mixture_effort(spec, plan, raw, coin.u01());
      }
      case SeenPhase::Reward:
        return 0.0;
    }
    return 0.0;
  }
  ordered_json descriptor() const override {
    return {{"name", "honest_top_mixture"}};
  }
};

}  // namespace

StrategyPtr make_strategy(const json& d) {
  require_object(d, "strategy");
  const std::string name = get_string(d, "name", "strategy");
  if (name == "honest_passive") {
    reject_unknown_keys(d, {"name"}, "strategy");
    return std::make_shared<HonestPassive>();
  }
  if (name == "top_performance") {
    reject_unknown_keys(d, {"name"}, "strategy");
    return std::make_shared<TopPerformance>();
  }
  if (name == "absorb_all") {
    reject_unknown_keys(d, {"name"}, "strategy");
    return std::make_shared<AbsorbAll>();
  }
  if (name == "constant_target") {
    reject_unknown_keys(d, {"name", "level"}, "strategy");
    return std::make_shared<ConstantTarget>(get_number(d, "level", "strategy"));
  }
  if (name == "mimic_then_absorb") {
    reject_unknown_keys(d, {"name", "level", "switch_pulls"}, "strategy");
    return std::make_shared<MimicThenAbsorb>(
        get_number(d, "level", "strategy"),
        get_integer(d, "switch_pulls", "strategy"));
  }
  if (name == "first_pull_overshoot") {
    reject_unknown_keys(d, {"name", "first", "then"}, "strategy");
    return std::make_shared<FirstPullOvershoot>(
        get_number(d, "first", "strategy"), get_number(d, "then", "strategy"));
  }
  if (name == "sp_pi_equilibrium") {
    reject_unknown_keys(d, {"name"}, "strategy");
    return std::make_shared<SpPiEquilibrium>();
  }
  if (name == "sp_pi_fixed_play") {
    reject_unknown_keys(d, {"name", "bid", "level"}, "strategy");
    return std::make_shared<SpPiFixedPlay>(get_number(d, "bid", "strategy"),
                                           get_number(d, "level", "strategy"));
  }
  if (name == "honest_top_mixture") {
    reject_unknown_keys(d, {"name"}, "strategy");
    return std::make_shared<HonestTopMixture>();
  }
  fail(Err::ConfigRejected, "strategy: unknown name \"" + name + "\"");
}

bool honesty_compatible(const json& d) {
  const std::string name = d.value("name", "");
  // These absorb rewards by construction; an honest arm may never do that.
  return name != "absorb_all" && name != "mimic_then_absorb" &&
         name != "sp_pi_fixed_play";
}

MixturePlan mixture_plan(const ArmSpec& spec, double m_prime,
                         std::int64_t horizon) {
  MixturePlan plan;
  plan.m_bar = m_prime + 1.0 / std::log(static_cast<double>(horizon));
  if (!spec.honest)
    fail(Err::PreconditionFailed,
         "honest_top_mixture requires an honest arm (arm " +
             std::to_string(spec.id) + " is not)");
  if (spec.mean >= plan.m_bar)
    fail(Err::PreconditionFailed,
         "honest_top_mixture: arm mean " + format_double(spec.mean) +
             " already reaches the target " + format_double(plan.m_bar) +
             "; no effort needed");
  if (plan.m_bar > spec.cap + effort_tolerance)
    fail(Err::PreconditionFailed,
         "honest_top_mixture: target " + format_double(plan.m_bar) +
             " exceeds the cap " + format_double(spec.cap));
  for (const Atom& a : atoms_of(spec)) {
    if (a.value >= plan.m_bar - effort_tolerance) {
      plan.upper_mass += a.prob;
      plan.upper_sum += a.prob * a.value;
    } else {
      plan.below_mass += a.prob;
      plan.below_sum += a.prob * a.value;
    }
  }
  // Lifting only the mass above the split must be able to reach m_bar:
  // below_sum + upper_mass·cap ≥ m_bar. Otherwise the below part is lifted
  // too. (Either way the resulting mean is exactly m_bar.)
  plan.lift_upper_only =
      plan.below_sum + plan.upper_mass * spec.cap >= plan.m_bar - effort_tolerance;
  if (plan.lift_upper_only) {
    plan.lift_prob = (plan.m_bar - plan.below_sum - plan.upper_sum) /
                     (plan.upper_mass * spec.cap - plan.upper_sum);
  } else {
    plan.lift_prob = (plan.m_bar - plan.upper_mass * spec.cap - plan.below_sum) /
                     (plan.below_mass * plan.m_bar - plan.below_sum);
  }
  return plan;
}

double mixture_effort(const ArmSpec& spec, const MixturePlan& plan, double raw,
                      double coin) {
  if (raw >= plan.m_bar - effort_tolerance) {
    if (plan.lift_upper_only)
      return coin < plan.lift_prob ? spec.cap - raw : 0.0;
    return spec.cap - raw;
  }
  if (plan.lift_upper_only) return 0.0;
  return coin < plan.lift_prob ? plan.m_bar - raw : 0.0;
}

double mixture_exact_mean(const ArmSpec& spec, const MixturePlan& plan) {
  double mean = 0.0;
  for (const Atom& a : atoms_of(spec)) {
    if (a.value >= plan.m_bar - effort_tolerance) {
      if (plan.lift_upper_only)
        mean += a.prob * (plan.lift_prob * spec.cap +
                          (1.0 - plan.lift_prob) * a.value);
      else
        mean += a.prob * spec.cap;
    } else {
      if (plan.lift_upper_only)
        mean += a.prob * a.value;
      else
        mean += a.prob * (plan.lift_prob * plan.m_bar +
                          (1.0 - plan.lift_prob) * a.value);
    }
  }
  return mean;
}

std::vector<double> sustainability_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  return grid;
}

namespace {

bool on_grid(double v, const std::vector<double>& grid) {
  for (double x : grid)
    if (std::abs(v - x) <= 1e-9) return true;
  return false;
}

double g_of(const ArmSpec& spec, double x) {
  double g = 0.0;
  for (const Atom& a : atoms_of(spec))
    g += a.prob * cost_of(spec, x - a.value);
  return g;
}

}  // namespace

SustainabilityReport compute_sustainability(const ArmSpec& spec,
                                            const std::vector<double>& grid) {
  for (const Atom& a : atoms_of(spec))
    if (!on_grid(a.value, grid))
      fail(Err::UnsupportedDistribution,
           "arm " + std::to_string(spec.id) + ": support point " +
               format_double(a.value) +
               " is not on the sustainability grid");
  SustainabilityReport report;
  report.m_f = 0.0;
  for (double x : grid) {
    if (x > spec.cap + 1e-9) break;
    const double g = g_of(spec, x);
    report.g_table.emplace_back(x, g);
    if (1.0 - g > effort_tolerance && x > report.m_f) report.m_f = x;
  }
  report.sustainable = std::abs(report.m_f - spec.cap) <= 1e-9;
  return report;
}

ConditionReport check_condition_5_1(const Instance& inst,
                                    const std::vector<double>& grid) {
  ConditionReport report;
  double min_headroom = std::numeric_limits<double>::infinity();
  for (int id : inst.top_set)
    min_headroom =
        std::min(min_headroom, 1.0 + inst.arms[id].mean - inst.maxall);
  report.threshold = min_headroom > 0.0
                         ? 2.0 / min_headroom
                         : std::numeric_limits<double>::infinity();
  report.holds = static_cast<double>(inst.k_top) > report.threshold;
  report.margin = static_cast<double>(inst.k_top) - report.threshold;

  // Cost-adjusted variant, evaluated whenever every arm's support sits on
  // the grid.
  std::vector<double> m_f(inst.arms.size(), 0.0);
  try {
    for (const auto& a : inst.arms)
      m_f[a.id] = compute_sustainability(a, grid).m_f;
  } catch (const Error& e) {
    if (e.code != Err::UnsupportedDistribution) throw;
    return report;
  }
  report.f2_evaluated = true;
  report.maxall_cost = 0.0;
  for (double v : m_f) report.maxall_cost = std::max(report.maxall_cost, v);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& a : inst.arms) {
    if (m_f[a.id] != report.maxall_cost) continue;
    report.k_top_cost += 1;
    const double denom = 1.0 - g_of(a, report.maxall_cost);
    const double ratio = denom > 0.0
                             ? (1.0 - g_of(a, 0.0)) / denom
                             : std::numeric_limits<double>::infinity();
    worst = std::min(worst, ratio);
  }
  report.f2_threshold = worst;
  report.f2_holds = static_cast<double>(report.k_top_cost) > worst;
  report.f2_margin = static_cast<double>(report.k_top_cost) - worst;
  return report;
}

}  // namespace stratband
