#pragma once

#include <stdexcept>
#include <string>

namespace bellman {

// Root of the library's exception hierarchy. Every throwing operation in
// bellman_core throws one of the types below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An invariant of a value type (exponents, coefficients, configs) was violated.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Point too close to a critical surface or coordinate plane for a
// second-order quantity to be evaluated.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ProbabilityError : public Error {
 public:
  using Error::Error;
};

class InfeasibleMoments : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class EpsilonError : public Error {
 public:
  using Error::Error;
};

class SearchFailure : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellman
