#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgq {

// Every failure the numerical modules can raise. The CLI maps all of these
// to exit status 3; ConfigError (below) maps to 2.
enum class ErrorCode {
  InvalidArgument,
  NotIsotropicCase,
  BracketNotFound,
  OffShell,
  NotAnExtremum,
  SingularAtZero,
  QuadratureFailure,
  MissingPhysicalBlock,
  RootMismatch,
  EvaluationOverflow,
  TooEarly,
  StepTooCoarse,
  OnSingularity,
  ContourFailure,
  TraceTooShort,
  NoSignChange,
  MaxIterations,
  OracleMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotIsotropicCase: return "NotIsotropicCase";
    case ErrorCode::BracketNotFound: return "BracketNotFound";
    case ErrorCode::OffShell: return "OffShell";
    case ErrorCode::NotAnExtremum: return "NotAnExtremum";
    case ErrorCode::SingularAtZero: return "SingularAtZero";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::MissingPhysicalBlock: return "MissingPhysicalBlock";
    case ErrorCode::RootMismatch: return "RootMismatch";
    case ErrorCode::EvaluationOverflow: return "EvaluationOverflow";
    case ErrorCode::TooEarly: return "TooEarly";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::OnSingularity: return "OnSingularity";
    case ErrorCode::ContourFailure: return "ContourFailure";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
  }
  return "Unknown";
}

}  // namespace bgq
