#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fundchoice {

enum class ErrorCode {
  Domain,              // negative choice or distance
  Lookup,              // tabulated utility queried off its grid
  Validation,          // inputs violate a model invariant
  PropOneUnavailable,  // closed-form consideration set needs an increasing c1
  MethodUnsupported,   // exact solver asked for a non-quadratic/linear family
  Configuration,       // malformed game (agent count, aggregator weights)
  PreconditionViolated,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::Lookup: return "Lookup";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::PropOneUnavailable: return "PropOneUnavailable";
    case ErrorCode::MethodUnsupported: return "MethodUnsupported";
    case ErrorCode::Configuration: return "Configuration";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fundchoice
