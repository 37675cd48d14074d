#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "stratband/core.hpp"

namespace stratband {

// Strict-parsing helpers. Configs fail fast on any unknown key so typos
// never silently change an experiment.
void require_object(const json& j, const std::string& where);
void reject_unknown_keys(const json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& where);
const json& require_key(const json& j, const std::string& key,
                        const std::string& where);

double get_number(const json& j, const std::string& key,
                  const std::string& where);
std::int64_t get_integer(const json& j, const std::string& key,
                         const std::string& where);
bool get_boolean(const json& j, const std::string& key,
                 const std::string& where);
std::string get_string(const json& j, const std::string& key,
                       const std::string& where);

ordered_json outcome_to_json(const EpisodeOutcome& out);

// CSV columns: round,arm,raw,effort,delivered,blocked,phase
std::string round_log_to_csv(const EpisodeOutcome& out);

// Shortest round-trip formatting, used everywhere a double is printed so
// identical runs serialize byte-identically.
std::string format_double(double v);

}  // namespace stratband
