#pragma once

#include <stdexcept>
#include <string>

namespace bargzero {

/// Numerical failure (non-convergence, residual too large, all restarts
/// diverged). Argument errors use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RootFindingFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TrainingFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PairingFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when every Bargmann coefficient falls below the noise floor.
class EmptyPolynomial : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bargzero
