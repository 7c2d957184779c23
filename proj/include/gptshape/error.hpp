#pragma once

#include <stdexcept>
#include <string>

namespace gptshape {

enum class ErrorCode {
  // configuration / input
  InvalidArgument,
  OddDegree,
  DegenerateInput,
  TooCoarse,
  InvalidPolygon,
  OutsideResolventBound,
  NoContrast,
  NotHarmonic,
  TooClose,
  ZeroPolynomial,
  DegreeMismatch,
  RejectedInput,
  EmptyInput,
  // numerical
  DegenerateMesh,
  NearSingular,
  NoCurveFound,
  AmbiguousKernel,
  Uninformative,
  EmptyLevelSet,
  // io
  IoError,
  ParseError,
};

enum class ErrorCategory { Config, Numeric, Io };

constexpr ErrorCategory category(ErrorCode code) {
  switch (code) {
  case ErrorCode::DegenerateMesh:
  case ErrorCode::NearSingular:
  case ErrorCode::NoCurveFound:
  case ErrorCode::AmbiguousKernel:
  case ErrorCode::Uninformative:
  case ErrorCode::EmptyLevelSet:
    return ErrorCategory::Numeric;
  case ErrorCode::IoError:
  case ErrorCode::ParseError:
    return ErrorCategory::Io;
  default:
    return ErrorCategory::Config;
  }
}

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::OddDegree: return "OddDegree";
  case ErrorCode::DegenerateInput: return "DegenerateInput";
  case ErrorCode::TooCoarse: return "TooCoarse";
  case ErrorCode::InvalidPolygon: return "InvalidPolygon";
  case ErrorCode::OutsideResolventBound: return "OutsideResolventBound";
  case ErrorCode::NoContrast: return "NoContrast";
  case ErrorCode::NotHarmonic: return "NotHarmonic";
  case ErrorCode::TooClose: return "TooClose";
  case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
  case ErrorCode::DegreeMismatch: return "DegreeMismatch";
  case ErrorCode::RejectedInput: return "RejectedInput";
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::DegenerateMesh: return "DegenerateMesh";
  case ErrorCode::NearSingular: return "NearSingular";
  case ErrorCode::NoCurveFound: return "NoCurveFound";
  case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
  case ErrorCode::Uninformative: return "Uninformative";
  case ErrorCode::EmptyLevelSet: return "EmptyLevelSet";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Library-wide exception. Every failure carries a machine-readable code.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace gptshape
