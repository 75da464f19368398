#ifndef VLAB_ERRORS_HPP
#define VLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parameters violate a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of a numerical procedure on valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Field evaluated (numerically) on top of a point vortex.
class SingularPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Two vortices came closer than the separation floor.
class CollisionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Parameters sit on a bifurcation (two saddle levels coincide).
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidBracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace vlab

#endif  // VLAB_ERRORS_HPP
