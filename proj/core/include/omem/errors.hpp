#pragma once

#include <stdexcept>
#include <string>

namespace omem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad parameters, configs, or file schemas.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised by the ODE integrator; carries the simulation time of the failure.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalError(what + " at t = " + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Input or output signal is identically zero, so it cannot be normalized.
class DegenerateSignalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace omem
