#pragma once

#include <stdexcept>
#include <string>

namespace phdae {

/// Failure categories raised by the library. The CLI maps them to exit codes.
enum class ErrorCode {
  kInvalidArgument,
  kSingularMatrix,
  kNotSymmetric,
  kNotSPD,
  kIndexTooHigh,
  kGridMismatch,
  kAllZero,
  kStepUnderflow,
  kDegenerateError,
  kNoStabilization,
  kTargetUnreachable,
  kTopologyError,
  kConfigError,
  kModelError,
  kStudyError,
};

/// Stable machine-readable name, e.g. "SingularMatrix".
const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phdae
