#pragma once

#include <stdexcept>
#include <string>

namespace framedisc {

// Shape or index violations: mismatched lengths, off-grid atoms, kernels
// living on different spaces.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid user-supplied parameters (widths, exponents, model sizes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Refusal to run an operation whose convergence is not certified,
// e.g. a Neumann series for a non-contractive U_Phi.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular or ill-conditioned numerics (frame operator below the floor,
// rank-deficient direct solve, series that did not converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace framedisc
