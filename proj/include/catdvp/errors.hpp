#pragma once

#include <stdexcept>
#include <string>

namespace catdvp {

/// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands of mismatched length (Pauli strings, tableaus, tensors).
struct SizeError : Error {
  using Error::Error;
};

/// Site, bond or position index outside its valid range.
struct RangeError : Error {
  using Error::Error;
};

/// A dense construction was refused because it exceeds its configured cap.
struct CapExceededError : Error {
  using Error::Error;
};

/// Malformed textual input (Pauli text, catalog files, snapshots).
struct ParseError : Error {
  using Error::Error;
};

/// Krylov exponentiation did not reach its tolerance within the subspace budget.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

/// A quantity that must be real, unitary or finite was not, beyond tolerance.
struct NumericalConsistencyError : Error {
  using Error::Error;
};

/// An operation needed state information (bond spectrum, canonical center)
/// that is not currently available.
struct StatePreparationError : Error {
  using Error::Error;
};

/// Broken internal invariant, e.g. use of a stale environment.
struct InternalError : Error {
  using Error::Error;
};

/// Invalid user-supplied configuration.
struct ValidationError : Error {
  using Error::Error;
};

/// A file could not be read or written.
struct IoError : Error {
  using Error::Error;
};

/// Two result tables do not share a beta grid.
struct GridMismatchError : Error {
  using Error::Error;
};

}  // namespace catdvp
