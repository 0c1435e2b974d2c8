#pragma once

#include <stdexcept>
#include <string>

namespace specdet {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (pole of Gamma, z <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Adaptive integration failed at a known abscissa.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double location)
      : Error(what + " at x = " + std::to_string(location)), location_(location) {}

  double location() const noexcept { return location_; }

 private:
  double location_;
};

class StepSizeUnderflow : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

// |y| exceeded the overflow guard. The problem is linear, so the caller may
// rescale the initial data and retry.
class SolutionOverflow : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

// W(0) is numerically zero: 0 is an eigenvalue of the unperturbed operator.
class VanishingDeterminant : public Error {
 public:
  using Error::Error;
};

// Two independent routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// The Dirichlet box [-L, L] is too small for the requested eigenvalues.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class MissedEigenvalue : public Error {
 public:
  using Error::Error;
};

class NonPositiveSpectrum : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace specdet
