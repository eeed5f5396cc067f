#pragma once

#include <stdexcept>
#include <string>

namespace kirchdelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied function (M, h, g, initial data) returned a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& function, double point);
  const std::string& function() const noexcept { return function_; }
  double point() const noexcept { return point_; }

 private:
  std::string function_;
  double point_;
};

/// Argument outside the domain of an operation (x outside [0, L], non-invertible g, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed for a characteristic root.
class RootFindingError : public Error {
 public:
  RootFindingError(int index, const std::string& what);
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// Galerkin matrix assembly produced an indefinite or non-symmetric matrix.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// A history lookup fell outside the retained time span.
class CoverageError : public Error {
 public:
  CoverageError(double requested, double covered_from, double covered_to);
  double requested() const noexcept { return requested_; }

 private:
  double requested_;
};

/// Incorrect call sequence (non-monotone push, insufficient sampling, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: parse errors, inconsistent numerics, unknown catalog entries.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Time integration could not continue (mass solve failure, non-finite state).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Decay fit on a window that contains nonpositive energy.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace kirchdelay
