#pragma once

#include <stdexcept>
#include <string>

namespace levyou {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Usage / configuration problems (CLI exit code 2).
class ConfigError : public Error {
  using Error::Error;
};
class DomainError : public Error {
  using Error::Error;
};
/// A fraction violates 1 + pi*psi*y > 0 somewhere on the jump support.
class AdmissibilityError : public Error {
  using Error::Error;
};
/// Jump support or coefficients make the requested quantity meaningless.
class DegenerateError : public Error {
  using Error::Error;
};
class CaseError : public Error {
  using Error::Error;
};

// Numerical failures (CLI exit code 3).
class NumericError : public Error {
  using Error::Error;
};
class QuadratureError : public NumericError {
  using NumericError::NumericError;
};
class ConvergenceError : public NumericError {
  using NumericError::NumericError;
};
class SolverError : public NumericError {
  using NumericError::NumericError;
};
class BranchError : public NumericError {
  using NumericError::NumericError;
};

}  // namespace levyou
