#pragma once

#include <stdexcept>
#include <string>

namespace vortlab {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  ComponentMismatch,
  Io,
  Parse,
  BlowUp,
  RangeExceeded,
  UnderResolved,
  NotEnoughData,
  ExponentRelation,
  StageFailure,
  UnknownSuite,
};

const char* to_string(ErrorCode code);

// Every failure carries a machine-readable code plus free-form context
// (which operation, which values).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& context);

  ErrorCode code() const { return code_; }
  const std::string& context() const { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& context);

}  // namespace vortlab
