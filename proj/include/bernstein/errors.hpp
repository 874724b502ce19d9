#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: wrong shapes, out-of-range parameters, unknown names.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point or parameter lies outside the domain where a map is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical kernel hit its iteration cap.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The rotated submanifold is no longer a graph over the domain plane.
class NonGraphic : public Error {
 public:
  NonGraphic(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// A precondition on the input data failed (e.g. a surface that is not minimal).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace bernstein
