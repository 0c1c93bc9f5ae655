#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aopnpl {

enum class ErrorCode {
  kNotSkewSymmetric,
  kNearPiRotation,
  kDegenerateLine,
  kSingularIntrinsics,
  kBehindCamera,
  kDegenerateProjectedLine,
  kEmptyInput,
  kInsufficientCorrespondences,
  kIllConditionedGram,
  kRepeatedSmallestEigenvalue,
  kRankDeficient,
  kUnderdetermined,
  kSingularNormalEquations,
  kRankDeficientConstraints,
  kSingularProjectedFisher,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries a typed code so callers
// (the CLI, the Monte Carlo harness) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aopnpl
