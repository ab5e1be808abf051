#pragma once

#include <stdexcept>
#include <string>

namespace wpflux {

// Exit codes of the command-line tool map onto these categories:
// UsageError -> 1, ValidationFailure -> 2, NumericalError -> 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input from the caller: malformed config, unknown key, empty series.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain where a quantity is defined (t = 0 for the
/// zero-flux locus, negative times, negative noise intensity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside a tabulated or sampled range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver configuration (grid too narrow, n not a power of two).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Quadrature non-convergence, boundary leakage in the spectral solver.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wpflux
