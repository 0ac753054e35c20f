#pragma once

#include <stdexcept>
#include <string>

namespace ctnav {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

// Raised when an observation contradicts an already-known edge status.
struct ObservationConflict : Error {
  using Error::Error;
};

struct ProtocolError : Error {
  using Error::Error;
};

struct PlanningStuckError : Error {
  using Error::Error;
};

struct LimitExceeded : Error {
  using Error::Error;
};

struct SceneError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace ctnav
