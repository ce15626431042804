#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cadml {

enum class ErrorCode {
  // data
  Io,
  EmptyInput,
  WrongFieldCount,
  NonNumericCell,
  InvalidValue,
  EmptyDataset,
  OutOfRangeTarget,
  UnknownFeature,
  LengthMismatch,
  TooFewPerClass,
  EmptyMatrix,
  InvalidModel,
  // training
  SingleClassData,
  TooFewRows,
  InvalidHyperParams,
  NonConvergence,
  AllCandidatesFailed,
  // usage
  Usage,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { usage, data, training };

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::Usage:
    return ErrorCategory::usage;
  case ErrorCode::SingleClassData:
  case ErrorCode::TooFewRows:
  case ErrorCode::InvalidHyperParams:
  case ErrorCode::NonConvergence:
  case ErrorCode::AllCandidatesFailed:
    return ErrorCategory::training;
  default:
    return ErrorCategory::data;
  }
}

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

private:
  ErrorCode code_;
};

} // namespace cadml
