#ifndef MAXFLAT_ERRORS_HPP
#define MAXFLAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace maxflat {

/// Malformed or out-of-contract input (dimension mismatch, non-finite
/// entries, determinant far from 1, asymmetric where symmetry is required).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Input is structurally valid but numerically degenerate (dependent
/// vectors, wedge norm below the scale-relative floor).
class DegenerateInputError : public InputError {
 public:
  explicit DegenerateInputError(const std::string& what) : InputError(what) {}
};

/// Arithmetic broke down mid-computation (non-finite iterates, step
/// underflow in the integrator).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Two independent computational routes that must agree did not.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maxflat

#endif
