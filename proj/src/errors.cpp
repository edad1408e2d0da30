#include "conebellman/errors.hpp"

namespace conebellman {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConeMismatch: return "ConeMismatch";
    case ErrorCode::kNotInteriorWeight: return "NotInteriorWeight";
    case ErrorCode::kNotInCone: return "NotInCone";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidProblem: return "InvalidProblem";
    case ErrorCode::kNegativeLambda: return "NegativeLambda";
    case ErrorCode::kInvarianceViolated: return "InvarianceViolated";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kUnstableGain: return "UnstableGain";
    case ErrorCode::kCertificationFailed: return "CertificationFailed";
    case ErrorCode::kNoGoal: return "NoGoal";
    case ErrorCode::kGoalNotAbsorbing: return "GoalNotAbsorbing";
    case ErrorCode::kGoalUnreachable: return "GoalUnreachable";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kSupportViolation: return "SupportViolation";
    case ErrorCode::kSingularInnerMatrix: return "SingularInnerMatrix";
    case ErrorCode::kUnreachableNode: return "UnreachableNode";
    case ErrorCode::kBadSeedConfig: return "BadSeedConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace conebellman
