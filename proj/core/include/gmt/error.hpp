#pragma once

#include <stdexcept>
#include <string>

namespace gmt {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidInput,         // exit 3
  kVerificationFailure,  // exit 2
  kDepthBudget,          // exit 4
  kIo,                   // exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string stage = {})
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const { return Error(kind_, what(), std::move(stage)); }

 private:
  ErrorKind kind_;
  std::string stage_;
};

[[noreturn]] inline void invalid_input(const std::string& message) {
  throw Error(ErrorKind::kInvalidInput, message);
}

[[noreturn]] inline void budget_exhausted(const std::string& message) {
  throw Error(ErrorKind::kDepthBudget, message);
}

int exit_code(ErrorKind kind) noexcept;

}  // namespace gmt
