#pragma once

#include <stdexcept>
#include <string>

namespace blendkit {

/// Base class for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable category ("validation", "unreadable", ...).
  virtual const char* kind() const noexcept = 0;
};

/// Bad dimensions, out-of-bounds placement, invalid parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class UnreadableError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unreadable"; }
};

class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported_format"; }
};

class UnwritableError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unwritable"; }
};

/// Conjugate gradient stopped at max_iters above tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  const char* kind() const noexcept override { return "not_converged"; }
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A loss term evaluated to NaN or infinity during optimization.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::string term)
      : Error(what), term_(std::move(term)) {}
  const char* kind() const noexcept override { return "diverged"; }
  const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

}  // namespace blendkit
