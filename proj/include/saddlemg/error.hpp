#pragma once

#include <stdexcept>
#include <string>

namespace saddlemg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A factorization met a pivot below its tolerance.
class SingularMatrixError : public Error {
public:
  using Error::Error;
};

/// Multigrid setup failed (stalled coarsening, indefinite coarse block, ...).
class SetupError : public Error {
public:
  using Error::Error;
};

/// Krylov iteration broke down numerically.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Invalid user input (bad level, unknown example, empty Dirichlet boundary).
class ArgumentError : public Error {
public:
  using Error::Error;
};

}  // namespace saddlemg
