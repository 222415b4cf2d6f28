#pragma once

#include <stdexcept>
#include <string>

namespace cmalab {

enum class ErrorKind {
  Argument,
  DomainMismatch,
  SymmetryViolation,
  ConeViolation,
  NonConvergence,
  ConvexityFailure,
  PremiseViolation,
  InvariantViolation,
  Compatibility,
  Chart,
  Precondition,
  Solver,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure surfaced by the library carries a kind so callers (the
/// experiment driver in particular) can map it to a stage and exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::DomainMismatch: return "domain mismatch";
    case ErrorKind::SymmetryViolation: return "symmetry violation";
    case ErrorKind::ConeViolation: return "cone violation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::ConvexityFailure: return "convexity failure";
    case ErrorKind::PremiseViolation: return "premise violation";
    case ErrorKind::InvariantViolation: return "invariant violation";
    case ErrorKind::Compatibility: return "compatibility error";
    case ErrorKind::Chart: return "chart error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Solver: return "solver error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace cmalab
