#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace zofd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid matrix/vector shape (ell outside [1, d], size mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range hyperparameter (h <= 0, theta outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A probability-zero degenerate random draw survived one resample.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Metric evaluated outside its domain (zero true gradient, f_0 <= f_min, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Objective rejected by the registry's consistency checks.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Registry lookup or insertion failure.
class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The objective returned NaN or +-inf. Carries the offending point.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const noexcept { return point_; }

 private:
  Eigen::VectorXd point_;
};

}  // namespace zofd
