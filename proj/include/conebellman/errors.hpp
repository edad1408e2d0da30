#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conebellman {

enum class ErrorCode {
  kConeMismatch,
  kNotInteriorWeight,
  kNotInCone,
  kEmptySet,
  kInvalidConfig,
  kMaxIterExceeded,
  kDiverged,
  kNonSquare,
  kShapeMismatch,
  kInvalidProblem,
  kNegativeLambda,
  kInvarianceViolated,
  kNotPositiveDefinite,
  kUnstableGain,
  kCertificationFailed,
  kNoGoal,
  kGoalNotAbsorbing,
  kGoalUnreachable,
  kSingularSystem,
  kSupportViolation,
  kSingularInnerMatrix,
  kUnreachableNode,
  kBadSeedConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace conebellman
