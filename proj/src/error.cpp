#include "airy/error.hpp"

namespace airy {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::NoResidueRoot: return "NoResidueRoot";
    case ErrorKind::PIsDividesN: return "PIsDividesN";
    case ErrorKind::EvenPrime: return "EvenPrime";
    case ErrorKind::ZeroTwist: return "ZeroTwist";
    case ErrorKind::MixedPrime: return "MixedPrime";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::DegreeTooLow: return "DegreeTooLow";
    case ErrorKind::CharDividesDegree: return "CharDividesDegree";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BadSubgroupSpec: return "BadSubgroupSpec";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace airy
