#pragma once

#include <stdexcept>
#include <string>

namespace inertid {

// Bad input values (non-positive mass, out-of-range duty, shape mismatch).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs that are individually valid but describe an unusable problem
// (empty body list, singular inertia tensor).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called in the wrong lifecycle state.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Integrator produced non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace inertid
