#pragma once

#include <stdexcept>
#include <string>

namespace learnpath {

enum class ErrorCode {
  kInvalidInput = 1,
  kSingularMatrix,
  kNumericOverflow,
  kOptimizationDiverged,
  kFormatError,
  kDivergedTraining,
  kConfigError,
  kIoError,
};

const char* error_code_name(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& message);

}  // namespace learnpath
