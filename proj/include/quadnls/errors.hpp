#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadnls {

enum class ErrorKind {
  InvalidArgument,
  GridMismatch,
  NonProjectable,
  NoConvergence,
  DomainTooSmall,
  DecayWindowUnderflow,
  TooFewSamples,
  LinearSolve,
  Config,
  UnknownSchema,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure modes
/// so callers (experiments, CLI exit codes) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonProjectable: return "NonProjectable";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::DecayWindowUnderflow: return "DecayWindowUnderflow";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::LinearSolve: return "LinearSolve";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::UnknownSchema: return "UnknownSchema";
  }
  return "Unknown";
}

}  // namespace quadnls
