#pragma once

#include <stdexcept>
#include <string>

namespace stratband {

enum class Err {
  NoHonestArm,
  SupportExceedsCap,
  MeanCapOrder,
  ConstraintViolation,
  AllArmsBlocked,
  TooFewBids,
  MissingAnnouncement,
  PreconditionFailed,
  UnsupportedDistribution,
  ConfigParse,
  ConfigRejected,
  UnknownScenario,
};

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& what) {
  throw Error(c, what);
}

}  // namespace stratband
