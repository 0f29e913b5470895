#pragma once

#include <stdexcept>
#include <string>

namespace pmvr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions of two operands do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value was violated (negative variance, empty batch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An arithmetic result left the finite reals.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Configuration or input-file validation failure. `field` is a path-like locator.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// File system or parse failure while reading or writing data.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmvr
