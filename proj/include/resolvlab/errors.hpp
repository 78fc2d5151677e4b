#pragma once

#include <stdexcept>
#include <string>

namespace resolvlab {

enum class ErrorKind {
  NonHermitian,
  ConvergenceFailure,
  Singular,
  NotPositiveDefinite,
  DimensionMismatch,
  NonFiniteEntries,
  SpectrumProximity,
  EndpointCollision,
  NegativeTime,
  NonFiniteFunctionValue,
  NotInvertible,
  GridMismatch,
  CoefficientSignViolation,
  NonZeroPotential,
  HypothesisViolation,
  RealSpectralParameter,
  ParseError,
  SchemaError,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the whole library; `kind()` identifies the
/// contract violation so callers and tests can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace resolvlab
