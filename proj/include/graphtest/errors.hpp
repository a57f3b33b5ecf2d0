#pragma once

#include <stdexcept>
#include <string>

namespace graphtest {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite coordinates, mismatched dimensions, malformed files.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// A scalar argument (k, lambda, epsilon, ...) is outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Kernel bandwidth from the median heuristic is zero.
class DegenerateBandwidthError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Operation called on an edge system of the wrong orientation.
class ModeError : public Error {
 public:
  using Error::Error;
};

// Grounded Laplacian is numerically singular at the requested temperature.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double lambda)
      : Error(what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

// Permutation-null variance is zero, so no t-statistic exists.
class DegenerateNullError : public Error {
 public:
  using Error::Error;
};

// Quadrature failure, divergent optimisation and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphtest
