#pragma once

#include <stdexcept>
#include <string>

namespace zoll {

// Precondition on an argument failed (non-finite input, bad size, k == 0, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structural invariant of a value does not hold (reality symmetry,
// positivity of A or B', monotonicity of the first integral).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quadrature self-test detected under-resolution.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear operator too ill-conditioned or singular to invert.
class SingularOperator : public std::runtime_error {
 public:
  SingularOperator(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

// The magnetic-geodesic flow left the regime where phi is monotone.
class FlowRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (coefficient, system, config files).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zoll
