#pragma once

#include <stdexcept>
#include <string>

namespace topbin {

// Every failure mode the library reports. The CLI maps these onto exit
// codes: data problems -> 3, numeric problems -> 4.
enum class ErrorCode {
  // data / input
  NonFiniteScore,
  LabelOutOfRange,
  RaggedEnsemble,
  TooFewSamples,
  ParseError,
  SchemaError,
  InvalidArgument,
  // numeric
  ConvergenceFailure,
  InteriorProbRequired,
  BoundaryProbability,
  EdgeMismatch,
  DegenerateClasses,
};

const char* error_code_name(ErrorCode code);

// True for codes that describe bad input rather than a numeric failure.
bool is_data_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topbin
