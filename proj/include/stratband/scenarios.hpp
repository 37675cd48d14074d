#pragma once

#include <string>
#include <vector>

#include "stratband/core.hpp"

namespace stratband {

// Named preset experiments. Each preset expands to a complete run config
// document, so `scenario <name>` behaves exactly like `run` on that file.
std::vector<std::string> scenario_names();

// Throws UnknownScenario (listing the registry) for names not registered.
ordered_json scenario_config(const std::string& name);

// One-line description per preset, for `scenario --list`.
std::string scenario_summary(const std::string& name);

}  // namespace stratband
