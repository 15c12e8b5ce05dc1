#include "learnpath/error.hpp"

namespace learnpath {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return "InvalidInput";
    case ErrorCode::kSingularMatrix:
      return "SingularMatrix";
    case ErrorCode::kNumericOverflow:
      return "NumericOverflow";
    case ErrorCode::kOptimizationDiverged:
      return "OptimizationDiverged";
    case ErrorCode::kFormatError:
      return "FormatError";
    case ErrorCode::kDivergedTraining:
      return "DivergedTraining";
    case ErrorCode::kConfigError:
      return "ConfigError";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace learnpath
