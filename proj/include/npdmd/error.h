#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npdmd {

enum class ErrorCode {
  kIo,
  kMalformedRow,
  kBadLabel,
  kNonFiniteValue,
  kTooFewSamples,
  kSingleClass,
  kLambdaOutOfRange,
  kNotConverged,
  kDimensionMismatch,
  kSingularCovariance,
  kZeroVector,
  kBadModel,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets front ends map failures to exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace npdmd
