#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace produkt {

enum class ErrorCode {
  NotSimpleParameters,
  NotPrimePower,
  TooLarge,
  IndexOutOfRange,
  WrongFamily,
  ContextMismatch,
  EmptySet,
  IdentityMissing,
  TooSmall,
  NotGenerating,
  StepLimitExceeded,
  NoNonSaturatedSteps,
  BadDensity,
  IdentityElement,
  BudgetExhausted,
  InstanceTooLarge,
  Incomplete,
  NotNormal,
  TrivialSet,
  NotSubgroup,
  TrivialSubgroup,
  NotFound,
  OutOfRange,
  NotDoubleTransposition,
  CoverMismatch,
  NotTransvection,
  CapExceeded,
  ParseError,
  DispatchError,
  UnsupportedFormat,
  BadParameter,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSimpleParameters: return "NotSimpleParameters";
    case ErrorCode::NotPrimePower: return "NotPrimePower";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WrongFamily: return "WrongFamily";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::IdentityMissing: return "IdentityMissing";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NotGenerating: return "NotGenerating";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::NoNonSaturatedSteps: return "NoNonSaturatedSteps";
    case ErrorCode::BadDensity: return "BadDensity";
    case ErrorCode::IdentityElement: return "IdentityElement";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::Incomplete: return "Incomplete";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::TrivialSet: return "TrivialSet";
    case ErrorCode::NotSubgroup: return "NotSubgroup";
    case ErrorCode::TrivialSubgroup: return "TrivialSubgroup";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotDoubleTransposition: return "NotDoubleTransposition";
    case ErrorCode::CoverMismatch: return "CoverMismatch";
    case ErrorCode::NotTransvection: return "NotTransvection";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DispatchError: return "DispatchError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace produkt
