#pragma once

#include <stdexcept>
#include <string>

namespace linenet {

// Bad user input: malformed spec, out-of-range parameter, unsupported option.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidStateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An iterative solve stopped at its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// State space larger than the configured cap.
class CapacityExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A block of the transition matrix lacks an expected structural property.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two quantities that must agree do not, or a model-derived value is out of range.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic failure: coincident mixture parameters, precision budget exhausted, degenerate normalizer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linenet
