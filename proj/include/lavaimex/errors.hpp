#pragma once

#include <stdexcept>
#include <string>

namespace lavaimex {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unreadable files, unknown keys, out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A matrix that had to be inverted was singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf or another breakdown of the discrete solution.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The CFL time step dropped below the configured floor.
class StiffnessCollapse : public NumericalFailure {
 public:
  StiffnessCollapse(double dt, double x, double y, const std::string& what)
      : NumericalFailure(what), dt_(dt), x_(x), y_(y) {}

  double dt() const noexcept { return dt_; }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

 private:
  double dt_;
  double x_;
  double y_;
};

}  // namespace lavaimex
