#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airy {

enum class ErrorKind {
  ConfigMismatch,
  PrecisionExhausted,
  DivisionByZero,
  NoResidueRoot,
  PIsDividesN,
  EvenPrime,
  ZeroTwist,
  MixedPrime,
  NotDiagonal,
  DegreeTooLow,
  CharDividesDegree,
  BudgetExceeded,
  NoConvergence,
  BadSubgroupSpec,
  InvalidArgument,
  ParseError,
};

std::string_view error_kind_name(ErrorKind kind);

/// All library failures are reported as this exception; `kind()` carries the
/// contract-level error name so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace airy
