#include "beamroam/error.hpp"

namespace beamroam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWindowOutsideTrace: return "WindowOutsideTrace";
    case ErrorCode::kDegenerateWindow: return "DegenerateWindow";
    case ErrorCode::kInvalidTrace: return "InvalidTrace";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kZeroDistance: return "ZeroDistance";
    case ErrorCode::kDegeneratePair: return "DegeneratePair";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kZeroDirection: return "ZeroDirection";
    case ErrorCode::kZeroSpeed: return "ZeroSpeed";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kMismatchedScenarios: return "MismatchedScenarios";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace beamroam
