#pragma once

#include <stdexcept>
#include <string>

namespace bform {

enum class ErrorCode {
  DegreeMismatch,
  LengthMismatch,
  InvalidArgument,
  ZeroForm,
  DegenerateInput,
  CollapsedDirections,
  OddDegree,
  BudgetExhausted,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroForm: return "ZeroForm";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::CollapsedDirections: return "CollapsedDirections";
    case ErrorCode::OddDegree: return "OddDegree";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bform
