#pragma once

#include <stdexcept>
#include <string>

namespace crlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or value outside the documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds an enumeration or table size guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Numerical failure: singular systems, quadrature or iteration blow-ups.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RankDeficientError : public NumericError {
 public:
  RankDeficientError(const std::string& what, int column) : NumericError(what), column_(column) {}

  /// Index of the first gain column found to depend on the earlier ones.
  int column() const noexcept { return column_; }

 private:
  int column_;
};

}  // namespace crlab
