#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

/// Base of every error thrown by the library. `numerical()` separates
/// failures of the numerics (saturation, singularity, stalled stepper)
/// from rejected input.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual bool numerical() const noexcept { return false; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the window in which the requested solution exists.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Profile parity does not match what the operation requires.
class ParityError : public Error {
 public:
  using Error::Error;
};

/// Root bracket for alpha(lambda) exceeded the saturation cap.
class SaturationError : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

/// Pendulum angle too close to +-pi/2 for the tan() reconstruction.
class SingularityError : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

/// Adaptive stepper could not make progress.
class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& what, double x) : Error(what), x_(x) {}
  bool numerical() const noexcept override { return true; }
  double where() const noexcept { return x_; }

 private:
  double x_;
};

/// The quarter-period event was not located within its safety horizon.
class EventNotFoundError : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

}  // namespace muskat
