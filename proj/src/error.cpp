#include "vortlab/error.hpp"

namespace vortlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::ComponentMismatch: return "component_mismatch";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::BlowUp: return "blow_up";
    case ErrorCode::RangeExceeded: return "range_exceeded";
    case ErrorCode::UnderResolved: return "under_resolved";
    case ErrorCode::NotEnoughData: return "not_enough_data";
    case ErrorCode::ExponentRelation: return "exponent_relation";
    case ErrorCode::StageFailure: return "stage_failure";
    case ErrorCode::UnknownSuite: return "unknown_suite";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& context)
    : std::runtime_error(std::string(to_string(code)) + ": " + context),
      code_(code),
      context_(context) {}

void fail(ErrorCode code, const std::string& context) { throw Error(code, context); }

}  // namespace vortlab
