#pragma once

#include <stdexcept>
#include <string>

namespace ftn {

// Mismatched extents, ranks or site counts between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input matrix is not symmetric within tolerance.
struct SymmetryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation
// (site out of range, zero-norm state, negative radicand, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Closed-form ground energy is complex for the requested coupling.
struct NoRealSolutionError : DomainError {
  using DomainError::DomainError;
};

// Dense size guard exceeded.
struct GuardError : std::length_error {
  using std::length_error::length_error;
};

// Loss became non-finite during optimization.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown key, bad value, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable serialized data.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ftn
