#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stratband/core.hpp"

using stratband::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string bin() {
  const char* path = std::getenv("STRAT_BANDIT_BIN");
  REQUIRE_MESSAGE(path != nullptr,
                  "STRAT_BANDIT_BIN must point at the strat-bandit binary");
  return path;
}

CmdResult run_cmd(const std::string& args) {
  const std::string full = bin() + " " + args + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("stratband_" + name);
}

std::string write_config(const std::string& name, const json& doc) {
  auto path = temp_file(name);
  std::ofstream f(path);
  f << doc.dump(2) << "\n";
  return path.string();
}

json tiny_arm(double mean, double cap, bool honest) {
  return {{"mean", mean},
          {"cap", cap},
          {"honest", honest},
          {"distribution", {{"kind", "scaled-bernoulli"}}},
          {"cost_coefficient", 1.0}};
}

json tiny_mc_doc() {
  json doc;
  doc["experiment"] = "monte-carlo";
  doc["instance"] = {{"horizon", 400},
                     {"seed", 1},
                     {"arms", {tiny_arm(0.5, 1.0, true), tiny_arm(0.4, 0.9, true)}}};
  doc["policy"] = {{"name", "ucb"}};
  doc["profile"] = {{{"name", "honest_passive"}}, {{"name", "honest_passive"}}};
  doc["seeds"] = {{"count", 6}, {"base", 1}};
  return doc;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a passing run prints its summary and exits zero") {
  CmdResult res = run_cmd("run " + write_config("pass.json", tiny_mc_doc()));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"verdict\": \"pass\"") != std::string::npos);
  CHECK(res.output.find("\"revenue_per_round\"") != std::string::npos);
}

TEST_CASE("a failing verdict exits one") {
  json doc;
  doc["experiment"] = "condition";
  doc["instance"] = {{"horizon", 1000},
                     {"seed", 1},
                     {"arms", {tiny_arm(0.9, 1.0, true), tiny_arm(0.9, 0.9, true)}}};
  CmdResult res = run_cmd("run " + write_config("fail.json", doc));
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("\"verdict\": \"fail\"") != std::string::npos);
}

TEST_CASE("configuration errors exit two with a message") {
  json doc = tiny_mc_doc();
  doc["profile"] = {{{"name", "absorb_all"}}, {{"name", "honest_passive"}}};
  CmdResult res = run_cmd("run " + write_config("honest.json", doc));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("error:") != std::string::npos);
  CHECK(res.output.find("honest") != std::string::npos);

  CmdResult missing = run_cmd("run /no/such/file.json");
  CHECK(missing.exit_code == 2);

  auto path = temp_file("broken.json");
  std::ofstream(path) << "{ not json";
  CmdResult broken = run_cmd("run " + path.string());
  CHECK(broken.exit_code == 2);
  CHECK(broken.output.find("error:") != std::string::npos);
}

TEST_CASE("the summary file mirrors stdout") {
  json doc = tiny_mc_doc();
  auto out_path = temp_file("summary_out.json");
  std::filesystem::remove(out_path);
  doc["output"] = {{"summary", out_path.string()}};
  CmdResult res = run_cmd("run " + write_config("mirror.json", doc));
  REQUIRE(res.exit_code == 0);
  std::ifstream f(out_path);
  REQUIRE(f.good());
  std::stringstream buffer;
  buffer << f.rdbuf();
  CHECK(buffer.str() == res.output);
}

TEST_CASE("episodes can dump a per-round log") {
  json doc;
  doc["experiment"] = "episode";
  doc["instance"] = {{"horizon", 50},
                     {"seed", 1},
                     {"arms", {tiny_arm(0.5, 1.0, true), tiny_arm(0.4, 0.9, true)}}};
  doc["policy"] = {{"name", "ucb"}};
  doc["profile"] = {{{"name", "honest_passive"}}, {{"name", "honest_passive"}}};
  auto rounds_path = temp_file("rounds.csv");
  std::filesystem::remove(rounds_path);
  doc["output"] = {{"rounds", rounds_path.string()}};
  CmdResult res = run_cmd("run " + write_config("rounds.json", doc));
  REQUIRE(res.exit_code == 0);
  std::ifstream f(rounds_path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "round,arm,raw,effort,delivered,blocked,phase");
  int lines = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 50);
}

TEST_CASE("the worker count never changes the output") {
  json doc = tiny_mc_doc();
  doc["workers"] = 1;
  CmdResult one = run_cmd("run " + write_config("w1.json", doc));
  doc["workers"] = 3;
  CmdResult three = run_cmd("run " + write_config("w3.json", doc));
  REQUIRE(one.exit_code == 0);
  REQUIRE(three.exit_code == 0);
  CHECK(one.output == three.output);
}

TEST_CASE("a one-point sweep is the same run") {
  json sweep_doc = tiny_mc_doc();
  sweep_doc["horizons"] = {300};
  json run_doc = tiny_mc_doc();
  run_doc["instance"]["horizon"] = 300;
  CmdResult swept = run_cmd("sweep " + write_config("sweep1.json", sweep_doc));
  CmdResult ran = run_cmd("run " + write_config("run1.json", run_doc));
  REQUIRE(swept.exit_code == 0);
  REQUIRE(ran.exit_code == 0);
  CHECK(swept.output == ran.output);
}

TEST_CASE("a multi-point sweep reports a trend table") {
  json doc = tiny_mc_doc();
  doc["horizons"] = {300, 600};
  CmdResult res = run_cmd("sweep " + write_config("sweep2.json", doc));
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("\"sweep:monte-carlo\"") != std::string::npos);
  CHECK(res.output.find("\"trend\"") != std::string::npos);
  CHECK(res.output.find("\"runs\"") != std::string::npos);
}

TEST_CASE("scenario --list names every preset") {
  CmdResult res = run_cmd("scenario --list");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("thm-4.2-robustness") != std::string::npos);
  CHECK(res.output.find("appendix-D-mixture") != std::string::npos);
  CHECK(res.output.find("remark-6.1-blocking") != std::string::npos);
  CHECK(res.output.find("thm-6.1-sp-pi-equilibrium") != std::string::npos);
}

TEST_CASE("scenario --dump-config prints the expanded document") {
  CmdResult res = run_cmd("scenario thm-B.1-eps-regret --dump-config");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"experiment\": \"regret\"") != std::string::npos);
  json parsed = json::parse(res.output);
  CHECK(parsed.contains("instance"));
}

TEST_CASE("a cheap preset runs end to end") {
  CmdResult res = run_cmd("scenario cond-5.1-check");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"verdict\": \"pass\"") != std::string::npos);
}

TEST_CASE("unknown scenario names are an error") {
  CmdResult res = run_cmd("scenario no-such-preset");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("unknown scenario") != std::string::npos);
}

TEST_CASE("a subcommand is required") {
  CmdResult res = run_cmd("");
  CHECK(res.exit_code != 0);
}

}  // TEST_SUITE
