#pragma once

#include <stdexcept>
#include <string>

namespace mswlab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (CSV rows, config files).
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Request is well-formed but outside what a solver supports (e.g. grid in d > 3).
class UnsupportedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo experiment could not produce a meaningful result.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

}  // namespace mswlab
