#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

// Failure categories, used by the CLI to pick exit codes: input/schema problems
// exit with 2, failed construction searches with 3, everything reported by the
// checks themselves with 1.
enum class ErrorCode {
  InvalidSpec,
  OutOfRange,
  StructureViolation,
  DegenerateImmersion,
  UmbilicDegeneracy,
  NotConformalizable,
  NoRoot,
  ConvergenceFailure,
  BandExit,
  StepFailure,
  NotFound,
  OpenProfile,
  NoTouchingPair,
  NotNonnegativeAtMax,
  RangeError,
  IllConditioned,
  DivisionDegeneracy,
  BadInput,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::DegenerateImmersion: return "DegenerateImmersion";
    case ErrorCode::UmbilicDegeneracy: return "UmbilicDegeneracy";
    case ErrorCode::NotConformalizable: return "NotConformalizable";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::BandExit: return "BandExit";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::OpenProfile: return "OpenProfile";
    case ErrorCode::NoTouchingPair: return "NoTouchingPair";
    case ErrorCode::NotNonnegativeAtMax: return "NotNonnegativeAtMax";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DivisionDegeneracy: return "DivisionDegeneracy";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, std::string(error_code_name(code)) + ": " + msg);
}

}  // namespace wlab
