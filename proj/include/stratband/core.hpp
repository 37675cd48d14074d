#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratband/errors.hpp"
#include "stratband/rng.hpp"

namespace stratband {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

struct DistributionSpec {
  enum class Kind { ScaledBernoulli, DiscreteFinite };
  Kind kind = Kind::ScaledBernoulli;
  std::vector<Atom> atoms;  // DiscreteFinite only, in declaration order
};

struct ArmSpec {
  int id = 0;
  double mean = 0.0;
  double cap = 1.0;   // delivered rewards can never exceed this
  bool honest = false;
  DistributionSpec distribution;
  double cost_coefficient = 1.0;  // linear effort cost: f(x) = a * x
};

// Two-point support of the arm's reward law, or the explicit atom list.
std::vector<Atom> atoms_of(const ArmSpec& spec);

struct Instance {
  std::vector<ArmSpec> arms;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;  // default seed when a run supplies none

  // Derived once at build time.
  double maxall = 0.0;          // highest cap over all arms
  std::vector<int> top_set;     // arms whose cap equals maxall
  int k_top = 0;                // |top_set|
  int honest_best = -1;         // honest arm with the highest mean
  double honest_mean = 0.0;     // that arm's mean
  double second_cap = 0.0;      // highest cap strictly below maxall, 0 if none

  int k() const { return static_cast<int>(arms.size()); }
};

// Deterministic raw-reward source: the value of pull j of an arm is a pure
// function of (seed, arm, j), independent of when the pull happens. Pull
// indices are 1-based.
struct RewardTape {
  std::uint64_t seed = 0;
  int arm = 0;
};

double sample_raw(const RewardTape& tape, const ArmSpec& spec,
                  std::int64_t pull_index);

// Checks the effort constraints and returns raw + effort. Violations abort
// the episode; nothing is clamped.
double validate_effort(const ArmSpec& spec, double raw, double effort);

inline constexpr double effort_tolerance = 1e-12;

struct PullRecord {
  std::int64_t pull_index = 0;  // 1-based
  double raw = 0.0;
  double effort = 0.0;
  double delivered = 0.0;
};

struct Announcement {
  std::string tag;
  double value = 0.0;
};

inline const std::string announce_second_bid = "second-bid";
inline const std::string announce_reward_phase = "reward-phase";

// Everything an arm is allowed to observe: its own pulls plus broadcasts.
// No round indices and no other arm's data ever reach a strategy.
struct OwnHistory {
  std::int64_t own_pull_count = 0;
  std::vector<PullRecord> records;
  std::vector<Announcement> announcements;

  const Announcement* find(const std::string& tag) const {
    for (const auto& a : announcements)
      if (a.tag == tag) return &a;
    return nullptr;
  }
};

enum class Phase { Play, Bid, Pi, Reward };

const char* phase_name(Phase p);

struct RoundLogEntry {
  std::int64_t round = 0;  // 1-based
  int arm = 0;
  double raw = 0.0;
  double effort = 0.0;
  double delivered = 0.0;
  bool blocked = false;  // arm was blocked at the time of this pull
  Phase phase = Phase::Play;
};

// First round of each phase, 1-based; 0 when the phase does not occur.
struct PhaseMarks {
  std::int64_t bidding_start = 0;
  std::int64_t pi_start = 0;
  std::int64_t reward_start = 0;
};

struct EpisodeOutcome {
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> pulls;  // T_i(n)
  std::vector<double> effort;       // C_i(n), signed sum of efforts
  std::vector<double> cost;         // sum of f_i(c_i(t))
  std::vector<double> utility;      // T_i(n) - cost_i
  double revenue = 0.0;             // sum of delivered rewards
  std::vector<bool> blocked;        // mechanism runs only
  PhaseMarks phase_marks;
  std::vector<std::int32_t> pull_sequence;  // per-round arm ids, if requested
  std::vector<RoundLogEntry> round_log;     // if requested
};

struct EpisodeOptions {
  bool record_rounds = false;
  bool record_pull_sequence = false;
};

// Ingests the instance document:
// { "horizon": int, "arms": [ { "mean": .., "cap": .., "honest": ..,
//   "distribution": {..}, "cost_coefficient": .. } ], "seed": int }
// Unknown fields anywhere are rejected.
Instance build_instance(const json& config);

ordered_json instance_to_json(const Instance& inst);

}  // namespace stratband
