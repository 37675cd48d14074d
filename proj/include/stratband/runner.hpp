#pragma once

#include <string>

#include "stratband/engine.hpp"

namespace stratband {

// A fully parsed run description. Parsing is strict: every field must be
// known, spelled exactly, and allowed for the chosen experiment.
struct RunConfig {
  json raw;  // the document as given, kept for horizon sweeps
  std::string experiment;
  Instance instance;
  Controller controller;
  Profile profile;

  std::vector<std::uint64_t> seeds;
  int workers = 0;

  double tau = 0.05;
  double slack_coefficient = 4.0;
  std::string expect;

  // deviation / coupled / blocking-necessity
  int deviation_arm = 0;            // -1 selects the fewest-pulls arm
  StrategyPtr deviation_strategy;
  double pulls_bound_coefficient = 2.0;  // blocked deviator: T ≤ c (ln n)^(rho+3)

  // fata
  std::vector<int> fata_subset;

  // sharp-adaptivity
  int test_arm = 0;
  double alpha_threshold = 0.05;

  // revenue-floor
  std::vector<Profile> floor_profiles;

  // mixture-check
  double m_bar = 0.0;
  std::int64_t mixture_pulls = 0;
  double mixture_tolerance = 0.002;

  // monte-carlo
  bool expect_no_blocking = false;

  // regret
  double max_normalized = 0.0;  // 0 disables the single-run bound

  // sweep
  std::vector<std::int64_t> horizons;
  double ladder_ratio_bound = 2.0;

  std::string out_summary;
  std::string out_rounds;
};

RunConfig parse_run_config(const json& doc);

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 fail
  ordered_json summary;
};

// Executes one parsed config (no file IO).
RunResult execute(const RunConfig& cfg);

// Executes the config once per horizon in cfg.horizons and appends a trend
// table; with a single horizon this is identical to execute.
RunResult execute_sweep(const RunConfig& cfg);

// Reads, runs, writes artifacts. Returns the process exit code:
// 0 verdict pass, 1 verdict fail, 2 configuration error.
int run(const std::string& config_path);
int run_sweep(const std::string& config_path);

// Effective worker count: the configured value capped by the
// STRAT_BANDIT_WORKERS environment variable when it is set.
int resolve_workers(int configured);

}  // namespace stratband
