#pragma once

#include <stdexcept>
#include <string>

namespace relmotion {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary operation on operators/states of different Hilbert-space dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by an argument (e.g. a non-Hermitian observable).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integrator or quadrature left its accuracy envelope.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed configuration with an out-of-range or missing field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace relmotion
