#pragma once

#include <stdexcept>
#include <string>

namespace alexot {

enum class ErrorKind {
  Validation,
  DegenerateInput,
  SingularPoint,
  Chart,
  Domain,
  Size,
  NotDifferentiable,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::Chart: return "chart";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Size: return "size";
    case ErrorKind::NotDifferentiable: return "not-differentiable";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace alexot
