#include "resolvlab/errors.hpp"

namespace resolvlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteEntries: return "NonFiniteEntries";
    case ErrorKind::SpectrumProximity: return "SpectrumProximity";
    case ErrorKind::EndpointCollision: return "EndpointCollision";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::NonFiniteFunctionValue: return "NonFiniteFunctionValue";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::CoefficientSignViolation: return "CoefficientSignViolation";
    case ErrorKind::NonZeroPotential: return "NonZeroPotential";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::RealSpectralParameter: return "RealSpectralParameter";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace resolvlab
