#pragma once

#include <stdexcept>

namespace csd {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model parameters outside their allowed ranges.
struct DomainError : Error {
  using Error::Error;
};

// The closed-form receiver errors are stated for equal priors only.
struct InvalidPriorError : DomainError {
  using DomainError::DomainError;
};

// Optimality condition has no unique solution (e.g. alpha = 0, where every
// displacement gives error 1/2).
struct DegenerateInputError : Error {
  using Error::Error;
};

// Parameter combination hits a singular factor (|alpha| = |gamma|).
struct SingularInputError : Error {
  using Error::Error;
};

struct InvalidBracketError : Error {
  using Error::Error;
};

struct NoSignChangeError : Error {
  using Error::Error;
};

// Iteration cap reached before the residual tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Bad or inconsistent run configuration (file or flags).
struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A formula produced a value its own algebra forbids. Indicates a bug, not
// a model regime; never clamped away.
struct InternalConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace csd
