#pragma once

#include <doctest.h>

#include <initializer_list>
#include <utility>

#include "stratband/core.hpp"
#include "stratband/errors.hpp"

namespace testutil {

inline stratband::json arm_doc(double mean, double cap, bool honest,
                               double cost = 1.0) {
  return {{"mean", mean},
          {"cap", cap},
          {"honest", honest},
          {"distribution", {{"kind", "scaled-bernoulli"}}},
          {"cost_coefficient", cost}};
}

inline stratband::json discrete_arm_doc(
    double mean, double cap, bool honest,
    std::initializer_list<std::pair<double, double>> atoms,
    double cost = 1.0) {
  stratband::json list = stratband::json::array();
  for (const auto& [value, prob] : atoms)
    list.push_back({{"value", value}, {"prob", prob}});
  return {{"mean", mean},
          {"cap", cap},
          {"honest", honest},
          {"distribution", {{"kind", "discrete"}, {"atoms", list}}},
          {"cost_coefficient", cost}};
}

inline stratband::json instance_doc(std::int64_t horizon,
                                    std::initializer_list<stratband::json> arms,
                                    std::uint64_t seed = 1) {
  stratband::json doc{{"horizon", horizon}, {"seed", seed}};
  doc["arms"] = stratband::json::array();
  for (const auto& a : arms) doc["arms"].push_back(a);
  return doc;
}

// Runs f, which must throw stratband::Error, and returns the code it carried.
template <typename F>
stratband::Err error_code(F&& f) {
  try {
    f();
  } catch (const stratband::Error& e) {
    return e.code;
  }
  FAIL("expected a stratband::Error");
  return stratband::Err::ConfigParse;
}

template <typename F>
std::string error_text(F&& f) {
  try {
    f();
  } catch (const stratband::Error& e) {
    return e.what();
  }
  FAIL("expected a stratband::Error");
  return {};
}

}  // namespace testutil
