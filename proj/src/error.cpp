#include "sumdecomp/error.hpp"

namespace sumdecomp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNotSquare: return "NotSquare";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kBadCutoff: return "BadCutoff";
    case ErrorCode::kNegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::kShiftTooSmall: return "ShiftTooSmall";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace sumdecomp
