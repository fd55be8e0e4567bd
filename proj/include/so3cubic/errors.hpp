#pragma once

#include <stdexcept>
#include <string>

namespace so3cubic {

enum class ErrorCode {
  DegenerateFrame,
  ZeroDirection,
  NotNearRotation,
  StepTooLarge,
  DegenerateB,
  DegenerateThirdDerivative,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::NotNearRotation: return "NotNearRotation";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DegenerateB: return "DegenerateB";
    case ErrorCode::DegenerateThirdDerivative: return "DegenerateThirdDerivative";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Raised by every numerical routine in the library. InvalidArgument marks a
/// violated precondition; every other code is a numerical degeneracy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace so3cubic
