#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vulnbench {

enum class ErrorCode {
  MalformedJson,
  SchemaViolation,
  InvariantViolation,
  IoError,
  EncodingError,
  EmptyProject,
  MalformedManifest,
  UnknownCategory,
  ProjectMismatch,
  AuthMissing,
  TransportError,
  ProviderError,
  NoFindingsPayload,
  InconsistentReport,
  MixedAnalyzers,
  EmptyInput,
  EmptyConfig,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::EmptyProject: return "EmptyProject";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::ProjectMismatch: return "ProjectMismatch";
    case ErrorCode::AuthMissing: return "AuthMissing";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::NoFindingsPayload: return "NoFindingsPayload";
    case ErrorCode::InconsistentReport: return "InconsistentReport";
    case ErrorCode::MixedAnalyzers: return "MixedAnalyzers";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyConfig: return "EmptyConfig";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library. `where()` carries the offending
/// field path, file name or (analyzer, project) cell when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string where = {})
      : std::runtime_error(compose(code, message, where)),
        code_(code),
        detail_(std::move(message)),
        where_(std::move(where)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& where() const noexcept { return where_; }

 private:
  static std::string compose(ErrorCode code, const std::string& message,
                             const std::string& where) {
    std::string out(to_string(code));
    if (!where.empty()) out += " at " + where;
    out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  std::string where_;
};

}  // namespace vulnbench
