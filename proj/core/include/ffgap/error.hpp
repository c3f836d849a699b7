#pragma once

#include <stdexcept>
#include <string>

namespace ffgap {

// Failure categories. The CLI maps each category onto its own exit code.
enum class ErrorCode {
  kInvalidArgument,
  kUnreachable,
  kDuplicateCoordinates,
  kInsufficientWidth,
  kUnsupportedRegion,
  kNegativeEigenvalue,
  kNotHermitian,
  kEmptyInteraction,
  kSupportOutsideRegion,
  kRegionTooLarge,
  kEigensolverFailed,
  kNotFrustrationFree,
  kDegreeExceedsBudget,
  kSingleLayer,
  kSplitNotAdmissible,
  kInsufficientData,
  kGaplessAtFiniteSize,
  kInconsistentSequence,
  kResampleBudgetExhausted,
  kParse,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace ffgap
