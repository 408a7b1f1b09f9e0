#include "groupsense/error.hpp"

namespace groupsense {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMalformedDocument: return "malformed_document";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kUnknownFeature: return "unknown_feature";
    case ErrorCode::kDepthViolation: return "depth_violation";
    case ErrorCode::kPolicyViolation: return "policy_violation";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
  }
  return "unknown";
}

}  // namespace groupsense
