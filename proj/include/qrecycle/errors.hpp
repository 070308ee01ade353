#pragma once

#include <stdexcept>
#include <string>

namespace qrecycle {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series, continued fraction or quadrature did not reach its tolerance.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite intermediate state or a value beyond a guard magnitude.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// An ODE solve lost monotonicity (Q' <= 0), usually a blow-up or bad initial slope.
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter region that is deliberately not implemented (e.g. VG with lambda < 1).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference computation failed; indicates broken test infrastructure.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrecycle
