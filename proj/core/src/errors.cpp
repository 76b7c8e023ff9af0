#include "lqropt/errors.hpp"

namespace lqropt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSquare:
      return "NonSquare";
    case ErrorCode::AsymmetricInput:
      return "AsymmetricInput";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::Unstable:
      return "Unstable";
    case ErrorCode::IllConditioned:
      return "IllConditioned";
    case ErrorCode::NotStabilizing:
      return "NotStabilizing";
    case ErrorCode::NonPositiveCurvature:
      return "NonPositiveCurvature";
    case ErrorCode::SingularCurvature:
      return "SingularCurvature";
    case ErrorCode::NoStabilizingSeed:
      return "NoStabilizingSeed";
    case ErrorCode::CertificateFailure:
      return "CertificateFailure";
    case ErrorCode::MaxIterExceeded:
      return "MaxIterExceeded";
    case ErrorCode::SamplingFailure:
      return "SamplingFailure";
    case ErrorCode::DegenerateDirection:
      return "DegenerateDirection";
    case ErrorCode::LeftStabilityRegion:
      return "LeftStabilityRegion";
    case ErrorCode::StabilityLost:
      return "StabilityLost";
    case ErrorCode::InsufficientData:
      return "InsufficientData";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::ValidationError:
      return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace lqropt
