#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace groupsense {

/// Failure categories surfaced by the engine. The service maps these onto
/// HTTP status codes, the CLI onto exit codes.
enum class ErrorCode {
  kInvalidArgument,     // caller-supplied value outside its domain
  kMalformedDocument,   // JSON/CSV that does not parse or has wrong types
  kInvariantViolation,  // well-formed input breaking a domain invariant
  kUnknownFeature,
  kDepthViolation,
  kPolicyViolation,
  kUnsupportedVersion,
  kNotFound,
  kConflict,
  kBudgetExceeded,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const { return code_; }
  /// JSON-pointer-like location of the offending field, when known.
  const std::string& path() const { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace groupsense
