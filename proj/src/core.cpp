#include "stratband/core.hpp"

#include <algorithm>
#include <cmath>

#include "stratband/serialize.hpp"

namespace stratband {

std::vector<Atom> atoms_of(const ArmSpec& spec) {
  if (spec.distribution.kind == DistributionSpec::Kind::DiscreteFinite)
    return spec.distribution.atoms;
  // ScaledBernoulli: mass mean/cap at cap, remainder at 0.
  const double p = spec.mean / spec.cap;
  std::vector<Atom> atoms;
  if (p < 1.0) atoms.push_back({0.0, 1.0 - p});
  if (p > 0.0) atoms.push_back({spec.cap, p});
  return atoms;
}

double sample_raw(const RewardTape& tape, const ArmSpec& spec,
                  std::int64_t pull_index) {
  const double u = rng::u01(tape.seed, rng::tape_stream(tape.arm),
                            static_cast<std::uint64_t>(pull_index));
  if (spec.distribution.kind == DistributionSpec::Kind::ScaledBernoulli) {
    return u < spec.mean / spec.cap ? spec.cap : 0.0;
  }
  double cum = 0.0;
  for (const auto& a : spec.distribution.atoms) {
    cum += a.prob;
    if (u < cum) return a.value;
  }
  return spec.distribution.atoms.back().value;
}

double validate_effort(const ArmSpec& spec, double raw, double effort) {
  if (effort < -raw - effort_tolerance)
    fail(Err::ConstraintViolation,
         "arm " + std::to_string(spec.id) + ": effort " +
             format_double(effort) + " absorbs more than the raw reward " +
             format_double(raw));
  if (raw + effort > spec.cap + effort_tolerance)
    fail(Err::ConstraintViolation,
         "arm " + std::to_string(spec.id) + ": delivered " +
             format_double(raw + effort) + " exceeds the cap " +
             format_double(spec.cap));
  if (spec.honest && effort < -effort_tolerance)
    fail(Err::ConstraintViolation,
         "arm " + std::to_string(spec.id) +
             " is honest and may not spend negative effort (got " +
             format_double(effort) + ")");
  return raw + effort;
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Play: return "play";
    case Phase::Bid: return "bid";
    case Phase::Pi: return "pi";
    case Phase::Reward: return "reward";
  }
  return "?";
}

namespace {

DistributionSpec parse_distribution(const json& j, double cap, double mean,
                                    const std::string& where) {
  require_object(j, where);
  const std::string kind = get_string(j, "kind", where);
  DistributionSpec dist;
  if (kind == "scaled-bernoulli") {
    reject_unknown_keys(j, {"kind"}, where);
    dist.kind = DistributionSpec::Kind::ScaledBernoulli;
    return dist;
  }
  if (kind != "discrete")
    fail(Err::ConfigRejected,
         where + ".kind: expected \"scaled-bernoulli\" or \"discrete\", got \"" +
             kind + "\"");
  reject_unknown_keys(j, {"kind", "atoms"}, where);
  dist.kind = DistributionSpec::Kind::DiscreteFinite;
  const json& atoms = require_key(j, "atoms", where);
  if (!atoms.is_array() || atoms.empty())
    fail(Err::ConfigRejected, where + ".atoms: expected a non-empty array");
  double total = 0.0, mass_mean = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::string awhere = where + ".atoms[" + std::to_string(a) + "]";
    require_object(atoms[a], awhere);
    reject_unknown_keys(atoms[a], {"value", "prob"}, awhere);
    Atom atom{get_number(atoms[a], "value", awhere),
              get_number(atoms[a], "prob", awhere)};
    if (atom.prob <= 0.0)
      fail(Err::ConfigRejected, awhere + ".prob must be positive");
    if (atom.value < -effort_tolerance || atom.value > cap + effort_tolerance)
      fail(Err::SupportExceedsCap,
           awhere + ": atom value " + format_double(atom.value) +
               " lies outside [0, cap=" + format_double(cap) + "]");
    total += atom.prob;
    mass_mean += atom.prob * atom.value;
    dist.atoms.push_back(atom);
  }
  if (std::abs(total - 1.0) > 1e-9)
    fail(Err::ConfigRejected,
         where + ".atoms: probabilities sum to " + format_double(total) +
             ", expected 1");
  if (std::abs(mass_mean - mean) > 1e-9)
    fail(Err::ConfigRejected,
         where + ": declared mean " + format_double(mean) +
             " does not match the atom mean " + format_double(mass_mean));
  return dist;
}

ArmSpec parse_arm(const json& j, int id) {
  const std::string where = "arms[" + std::to_string(id) + "]";
  require_object(j, where);
  reject_unknown_keys(
      j, {"mean", "cap", "honest", "distribution", "cost_coefficient"}, where);
  ArmSpec spec;
  spec.id = id;
  spec.mean = get_number(j, "mean", where);
  spec.cap = get_number(j, "cap", where);
  spec.honest = get_boolean(j, "honest", where);
  spec.cost_coefficient = get_number(j, "cost_coefficient", where);
  if (spec.cap <= 0.0 || spec.cap > 1.0)
    fail(Err::ConfigRejected,
         where + ".cap must lie in (0, 1], got " + format_double(spec.cap));
  if (spec.mean < 0.0)
    fail(Err::ConfigRejected, where + ".mean must be non-negative");
  if (spec.mean > spec.cap)
    fail(Err::MeanCapOrder, where + ": mean " + format_double(spec.mean) +
                                " exceeds cap " + format_double(spec.cap));
  if (spec.cost_coefficient <= 0.0)
    fail(Err::ConfigRejected, where + ".cost_coefficient must be positive");
  spec.distribution = parse_distribution(require_key(j, "distribution", where),
                                         spec.cap, spec.mean,
                                         where + ".distribution");
  return spec;
}

}  // namespace

Instance build_instance(const json& config) {
  require_object(config, "instance");
  reject_unknown_keys(config, {"horizon", "arms", "seed"}, "instance");
  Instance inst;
  inst.horizon = get_integer(config, "horizon", "instance");
  inst.seed =
      static_cast<std::uint64_t>(get_integer(config, "seed", "instance"));
  const json& arms = require_key(config, "arms", "instance");
  if (!arms.is_array())
    fail(Err::ConfigRejected, "instance.arms: expected an array");
  for (std::size_t i = 0; i < arms.size(); ++i)
    inst.arms.push_back(parse_arm(arms[i], static_cast<int>(i)));

  if (inst.k() < 2)
    fail(Err::ConfigRejected, "instance needs at least 2 arms");
  if (inst.horizon < inst.k())
    fail(Err::ConfigRejected,
         "instance.horizon must be at least the number of arms");

  inst.maxall = 0.0;
  for (const auto& a : inst.arms) inst.maxall = std::max(inst.maxall, a.cap);
  for (const auto& a : inst.arms)
    if (a.cap == inst.maxall) inst.top_set.push_back(a.id);
  inst.k_top = static_cast<int>(inst.top_set.size());
  inst.second_cap = 0.0;
  for (const auto& a : inst.arms)
    if (a.cap < inst.maxall) inst.second_cap = std::max(inst.second_cap, a.cap);
  for (const auto& a : inst.arms)
    if (a.honest && (inst.honest_best < 0 || a.mean > inst.honest_mean)) {
      inst.honest_best = a.id;
      inst.honest_mean = a.mean;
    }
  if (inst.honest_best < 0)
    fail(Err::NoHonestArm, "instance has no honest arm; at least one required");
  return inst;
}

ordered_json instance_to_json(const Instance& inst) {
  ordered_json arms = ordered_json::array();
  for (const auto& a : inst.arms) {
    ordered_json dist;
    if (a.distribution.kind == DistributionSpec::Kind::ScaledBernoulli) {
      dist["kind"] = "scaled-bernoulli";
    } else {
      dist["kind"] = "discrete";
      ordered_json atoms = ordered_json::array();
      for (const auto& at : a.distribution.atoms)
        atoms.push_back({{"value", at.value}, {"prob", at.prob}});
      dist["atoms"] = atoms;
    }
    arms.push_back({{"mean", a.mean},
                    {"cap", a.cap},
                    {"honest", a.honest},
                    {"distribution", dist},
                    {"cost_coefficient", a.cost_coefficient}});
  }
  return ordered_json{{"horizon", inst.horizon},
                      {"arms", arms},
                      {"seed", inst.seed},
                      {"maxall", inst.maxall},
                      {"k_top", inst.k_top},
                      {"second_cap", inst.second_cap},
                      {"honest_best", inst.honest_best}};
}

}  // namespace stratband
