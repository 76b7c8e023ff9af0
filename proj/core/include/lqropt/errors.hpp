#pragma once

#include <stdexcept>
#include <string>

namespace lqropt {

/// Failure categories surfaced by the library. Every throwing operation
/// documents which of these it can raise.
enum class ErrorCode {
  NonSquare,
  AsymmetricInput,
  DimensionMismatch,
  Unstable,
  IllConditioned,
  NotStabilizing,
  NonPositiveCurvature,
  SingularCurvature,
  NoStabilizingSeed,
  CertificateFailure,
  MaxIterExceeded,
  SamplingFailure,
  DegenerateDirection,
  LeftStabilityRegion,
  StabilityLost,
  InsufficientData,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace lqropt
