#include "npdmd/error.h"

namespace npdmd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kLambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kBadModel: return "BadModel";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace npdmd
