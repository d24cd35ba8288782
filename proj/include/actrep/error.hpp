#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace actrep {

enum class ErrorCode {
  DegenerateVector,
  TopologyMismatch,
  NoPriorValue,
  WindowTooShort,
  DegenerateInput,
  SingularFit,
  WindowMismatch,
  ShapeMismatch,
  NonConsecutiveFrame,
  Capacity,
  InvalidScript,
  InvalidTruth,
  Parse,
  Config,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::TopologyMismatch: return "TopologyMismatch";
    case ErrorCode::NoPriorValue: return "NoPriorValue";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonConsecutiveFrame: return "NonConsecutiveFrame";
    case ErrorCode::Capacity: return "CapacityError";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::InvalidTruth: return "InvalidTruth";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Config: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` distinguishes failure kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace actrep
