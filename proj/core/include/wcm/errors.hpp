#pragma once

#include <stdexcept>
#include <string>

namespace wcm {

// Base of every error raised by the library. The CLI maps ValidationError
// (and its subclasses) to exit code 2 and NumericError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Array lengths or matrix shapes that do not agree.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Argument outside the mathematical domain of an operation (t > horizon, x = NaN, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Inconsistent configuration: unsupported basis for an engine, bad grid, bad file.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Implied-volatility or exotic-vol inversion failure.
class InversionError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace wcm
