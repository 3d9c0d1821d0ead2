#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ec {

/// Base exception for every engine failure. `code()` is a stable machine
/// readable identifier (e.g. "InfeasibleSpec") that the gateway maps onto an
/// HTTP status and the CLI prints on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct FieldIssue {
  std::string field;
  std::string message;
};

/// Raised when user supplied parameters fail schema checks. Carries one issue
/// per offending field so callers can re-ask precisely.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldIssue> issues)
      : Error("ValidationFailed", summarize(issues)), issues_(std::move(issues)) {}

  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<FieldIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += "; ";
      out += i.field + ": " + i.message;
    }
    return out.empty() ? std::string("validation failed") : out;
  }

  std::vector<FieldIssue> issues_;
};

}  // namespace ec
