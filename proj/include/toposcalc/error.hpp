#pragma once

#include <stdexcept>
#include <string>

namespace toposcalc {

// Every failure mode of the library carries one of these codes, so callers
// (and tests) can dispatch on the kind of violation without parsing text.
enum class ErrorCode {
  MissingComposite,
  AssociativityViolation,
  IdentityViolation,
  UnknownObject,
  UnknownArrow,
  ShapeMismatch,
  SizeCapExceeded,
  NotAMono,
  NotLocal,
  MissingMaximal,
  StabilityViolation,
  TransitivityViolation,
  NotAClosureOperator,
  IsoForcingIncomplete,
  EnumerationUnavailable,
  ResidualNotTrivial,
  NotNested,
  SyntaxError,
  SemanticError,
  ValidationError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace toposcalc
