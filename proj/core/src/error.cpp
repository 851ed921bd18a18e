#include "th/error.hpp"

namespace th {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Scene: return "SceneError";
    case ErrorKind::DegenerateContact: return "DegenerateContact";
    case ErrorKind::EscapedBbox: return "EscapedBbox";
    case ErrorKind::NonTraversing: return "NonTraversing";
    case ErrorKind::CurveExtraction: return "CurveExtraction";
    case ErrorKind::InconsistentQuotient: return "InconsistentQuotient";
    case ErrorKind::UnmatchedClass: return "UnmatchedClass";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace th
