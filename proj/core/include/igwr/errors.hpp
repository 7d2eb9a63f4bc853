#pragma once

#include <stdexcept>
#include <string>

namespace igwr {

enum class ErrorCode {
  NonFinite,
  ShapeMismatch,
  ConstantResponse,
  DegenerateGeometry,
  NegativeBandwidth,
  SingularNormalMatrix,
  InfeasibleCardinality,
  NonFiniteErrors,
  NonMonotoneObjective,
  SearchBracketFailure,
  MissingColumn,
  UnparseableCell,
  EmptyFile,
  IoFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite:            return "NonFinite";
    case ErrorCode::ShapeMismatch:        return "ShapeMismatch";
    case ErrorCode::ConstantResponse:     return "ConstantResponse";
    case ErrorCode::DegenerateGeometry:   return "DegenerateGeometry";
    case ErrorCode::NegativeBandwidth:    return "NegativeBandwidth";
    case ErrorCode::SingularNormalMatrix: return "SingularNormalMatrix";
    case ErrorCode::InfeasibleCardinality:return "InfeasibleCardinality";
    case ErrorCode::NonFiniteErrors:      return "NonFiniteErrors";
    case ErrorCode::NonMonotoneObjective: return "NonMonotoneObjective";
    case ErrorCode::SearchBracketFailure: return "SearchBracketFailure";
    case ErrorCode::MissingColumn:        return "MissingColumn";
    case ErrorCode::UnparseableCell:      return "UnparseableCell";
    case ErrorCode::EmptyFile:            return "EmptyFile";
    case ErrorCode::IoFailure:            return "IoFailure";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is raised as an Exception;
/// code() distinguishes bad input from numerical breakdown.
class Exception : public std::runtime_error {
 public:
  Exception(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Input-side failures map to CLI exit code 2, numerical ones to 3.
inline bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ConstantResponse:
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::InfeasibleCardinality:
    case ErrorCode::MissingColumn:
    case ErrorCode::UnparseableCell:
    case ErrorCode::EmptyFile:
    case ErrorCode::IoFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace igwr
