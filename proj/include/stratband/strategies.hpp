#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "stratband/core.hpp"

namespace stratband {

// An agent's behavior: a pure function of its spec, its own history, the
// raw reward just drawn, and a private random stream. Nothing else is
// reachable, which is what keeps the observation model blind.
struct Strategy {
  virtual ~Strategy() = default;
  virtual double effort(const ArmSpec& spec, std::int64_t horizon,
                        const OwnHistory& history, double raw,
                        rng::Stream& coin) const = 0;
  virtual ordered_json descriptor() const = 0;
};

using StrategyPtr = std::shared_ptr<const Strategy>;
using Profile = std::vector<StrategyPtr>;

// Descriptor forms:
//   {"name":"honest_passive"}
//   {"name":"top_performance"}
//   {"name":"absorb_all"}
//   {"name":"constant_target","level":0.9}
//   {"name":"mimic_then_absorb","level":0.65,"switch_pulls":50000}
//   {"name":"first_pull_overshoot","first":1.0,"then":0.8}
//   {"name":"sp_pi_equilibrium"}
//   {"name":"sp_pi_fixed_play","bid":0.1,"level":0.4}
//   {"name":"honest_top_mixture"}
StrategyPtr make_strategy(const json& descriptor);

// True when the descriptor can never violate the honesty constraint; used
// to reject configurations like absorb_all on an honest arm up front.
bool honesty_compatible(const json& descriptor);

// Linear effort cost.
inline double cost_of(const ArmSpec& spec, double effort) {
  return spec.cost_coefficient * effort;
}

// Randomized lift plan that moves an honest arm's delivered mean to exactly
// m_bar = m_prime + 1/ln(horizon) without ever spending negative effort.
// The reward law is split at m_bar; depending on how much mass sits above,
// either only the upper part is lifted to the cap (with probability
// lift_prob), or the upper part is always lifted and the lower part is
// lifted to m_bar with probability lift_prob.
struct MixturePlan {
  double m_bar = 0.0;
  bool lift_upper_only = false;  // the first case above
  double lift_prob = 0.0;
  double below_mass = 0.0, below_sum = 0.0;  // mass and Σ value·prob under m_bar
  double upper_mass = 0.0, upper_sum = 0.0;
};

MixturePlan mixture_plan(const ArmSpec& spec, double m_prime,
                         std::int64_t horizon);

// One mixture decision: the effort for a given raw draw and coin value.
double mixture_effort(const ArmSpec& spec, const MixturePlan& plan, double raw,
                      double coin);

// Exact delivered mean of the plan, summed over atoms and coin outcomes.
double mixture_exact_mean(const ArmSpec& spec, const MixturePlan& plan);

std::vector<double> sustainability_grid();  // 0, 0.05, ..., 1.0

struct SustainabilityReport {
  std::vector<std::pair<double, double>> g_table;  // (x, g(x)), x ≤ cap
  double m_f = 0.0;       // largest tabulated x with 1 - g(x) > 0
  bool sustainable = false;  // m_f equals the cap
};

// g(x) = expected cost of always delivering x: Σ_atoms f(x - value)·prob.
SustainabilityReport compute_sustainability(
    const ArmSpec& spec, const std::vector<double>& grid = sustainability_grid());

struct ConditionReport {
  // Enough competition at the top: k_top > 2 / min_top(1 + mean - maxall).
  bool holds = false;
  double threshold = 0.0;
  double margin = 0.0;  // k_top - threshold

  // Cost-adjusted variant over the arms whose sustainable cap M^f is
  // maximal: k_top_cost > min of (1 - g(0)) / (1 - g(maxall_cost)).
  bool f2_evaluated = false;
  bool f2_holds = false;
  double f2_threshold = 0.0;
  double f2_margin = 0.0;
  int k_top_cost = 0;
  double maxall_cost = 0.0;
};

ConditionReport check_condition_5_1(
    const Instance& inst,
    const std::vector<double>& grid = sustainability_grid());

}  // namespace stratband
