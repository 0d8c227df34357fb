#include "phdae/error.h"

namespace phdae {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNotSPD: return "NotSPD";
    case ErrorCode::kIndexTooHigh: return "IndexTooHigh";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kDegenerateError: return "DegenerateError";
    case ErrorCode::kNoStabilization: return "NoStabilization";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kTopologyError: return "TopologyError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kModelError: return "ModelError";
    case ErrorCode::kStudyError: return "StudyError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace phdae
