#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cpn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Mismatched jet base points or orders, invalid run parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A Laurent coefficient was requested outside the trusted window.
class WindowError : public Error {
public:
  using Error::Error;
};

/// A linear system whose uniqueness argument needs a nonzero sum became singular.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

/// Interpolated polynomial disagrees with a held-out determinant sample.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// Right-hand side at a resonance is not in the column space of the order-k matrix.
class CompatibilityError : public Error {
public:
  using Error::Error;
};

/// The order-by-order construction contradicted its own structural cross-checks.
class InternalConsistencyError : public Error {
public:
  using Error::Error;
};

/// Evaluation of the explicit solution at (or continuation through) a singular point.
class SingularityError : public Error {
public:
  SingularityError(const std::string& what, std::complex<double> nearest)
      : Error(what), nearest_branch_point_(nearest) {}

  std::complex<double> nearest_branch_point() const { return nearest_branch_point_; }

private:
  std::complex<double> nearest_branch_point_;
};

/// Continuation step too coarse: tracked branch data jumped by more than the limit.
class RefineStepsError : public Error {
public:
  using Error::Error;
};

} // namespace cpn
