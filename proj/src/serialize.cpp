#include "stratband/serialize.hpp"

#include <cstdio>
#include <cstring>

namespace stratband {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object())
    fail(Err::ConfigRejected, where + ": expected a JSON object");
}

void reject_unknown_keys(const json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known)
      fail(Err::ConfigRejected, where + ": unknown field \"" + it.key() + "\"");
  }
}

const json& require_key(const json& j, const std::string& key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    fail(Err::ConfigRejected, where + ": missing required field \"" + key + "\"");
  return *it;
}

double get_number(const json& j, const std::string& key,
                  const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number())
    fail(Err::ConfigRejected, where + "." + key + ": expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& key,
                         const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number_integer())
    fail(Err::ConfigRejected, where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

bool get_boolean(const json& j, const std::string& key,
                 const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_boolean())
    fail(Err::ConfigRejected, where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_string())
    fail(Err::ConfigRejected, where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string format_double(double v) {
  // Shortest representation that round-trips; same scheme the JSON dump
  // uses, so CSV and JSON agree byte for byte.
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

ordered_json outcome_to_json(const EpisodeOutcome& out) {
  ordered_json j;
  j["horizon"] = out.horizon;
  j["seed"] = out.seed;
  j["pulls"] = out.pulls;
  j["effort"] = out.effort;
  j["cost"] = out.cost;
  j["utility"] = out.utility;
  j["revenue"] = out.revenue;
  if (!out.blocked.empty()) {
    std::vector<bool> b(out.blocked.begin(), out.blocked.end());
    j["blocked"] = b;
    j["phase_marks"] = ordered_json{{"bidding_start", out.phase_marks.bidding_start},
                                    {"pi_start", out.phase_marks.pi_start},
                                    {"reward_start", out.phase_marks.reward_start}};
  }
  return j;
}

std::string round_log_to_csv(const EpisodeOutcome& out) {
  std::string csv = "round,arm,raw,effort,delivered,blocked,phase\n";
  for (const auto& e : out.round_log) {
    csv += std::to_string(e.round);
    csv += ',';
    csv += std::to_string(e.arm);
    csv += ',';
    csv += format_double(e.raw);
    csv += ',';
    csv += format_double(e.effort);
    csv += ',';
    csv += format_double(e.delivered);
    csv += ',';
    csv += e.blocked ? '1' : '0';
    csv += ',';
    csv += phase_name(e.phase);
    csv += '\n';
  }
  return csv;
}

}  // namespace stratband
