#include "cadml/error.hpp"

namespace cadml {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::Io:
    return "Io";
  case ErrorCode::EmptyInput:
    return "EmptyInput";
  case ErrorCode::WrongFieldCount:
    return "WrongFieldCount";
  case ErrorCode::NonNumericCell:
    return "NonNumericCell";
  case ErrorCode::InvalidValue:
    return "InvalidValue";
  case ErrorCode::EmptyDataset:
    return "EmptyDataset";
  case ErrorCode::OutOfRangeTarget:
    return "OutOfRangeTarget";
  case ErrorCode::UnknownFeature:
    return "UnknownFeature";
  case ErrorCode::LengthMismatch:
    return "LengthMismatch";
  case ErrorCode::TooFewPerClass:
    return "TooFewPerClass";
  case ErrorCode::EmptyMatrix:
    return "EmptyMatrix";
  case ErrorCode::InvalidModel:
    return "InvalidModel";
  case ErrorCode::SingleClassData:
    return "SingleClassData";
  case ErrorCode::TooFewRows:
    return "TooFewRows";
  case ErrorCode::InvalidHyperParams:
    return "InvalidHyperParams";
  case ErrorCode::NonConvergence:
    return "NonConvergence";
  case ErrorCode::AllCandidatesFailed:
    return "AllCandidatesFailed";
  case ErrorCode::Usage:
    return "Usage";
  }
  return "Error";
}

} // namespace cadml
