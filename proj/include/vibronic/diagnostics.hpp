#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vibronic {

/// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter value makes the requested quantity undefined (e.g. delta = 0).
class SingularParameter : public Error {
 public:
  using Error::Error;
};

/// Operands live on different Hilbert spaces or have mismatched sizes.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Numerical precondition violated or a numerical self-check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Inversion model is unidentifiable.
class DegenerateDesign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Non-fatal warnings accumulated by an operation (truncation, adiabaticity,
/// accidental resonances). Functions take an optional pointer; nullptr drops them.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const { return warnings.empty(); }
  void append(const Diagnostics& other) {
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace vibronic
