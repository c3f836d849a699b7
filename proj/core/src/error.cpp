#include "ffgap/error.hpp"

namespace ffgap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kDuplicateCoordinates: return "duplicate coordinates";
    case ErrorCode::kInsufficientWidth: return "insufficient width";
    case ErrorCode::kUnsupportedRegion: return "unsupported region";
    case ErrorCode::kNegativeEigenvalue: return "negative eigenvalue";
    case ErrorCode::kNotHermitian: return "not hermitian";
    case ErrorCode::kEmptyInteraction: return "empty interaction";
    case ErrorCode::kSupportOutsideRegion: return "support outside region";
    case ErrorCode::kRegionTooLarge: return "region too large";
    case ErrorCode::kEigensolverFailed: return "eigensolver failed";
    case ErrorCode::kNotFrustrationFree: return "not frustration-free";
    case ErrorCode::kDegreeExceedsBudget: return "degree exceeds smuggling budget";
    case ErrorCode::kSingleLayer: return "single layer: bound degenerate";
    case ErrorCode::kSplitNotAdmissible: return "split not admissible at this t";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kGaplessAtFiniteSize: return "gapless at finite size";
    case ErrorCode::kInconsistentSequence: return "inconsistent sequence lengths";
    case ErrorCode::kResampleBudgetExhausted: return "resample budget exhausted";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ffgap
