#pragma once

#include <stdexcept>
#include <string>

namespace fracstokes {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gamma function evaluated at a nonpositive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative evaluation did not reach tolerance within its cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-stepping scheme left its stability envelope.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectral data whose inverse transform would not be real.
class SymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// u^p requested on a negative sample with non-integer p.
class NegativeBaseError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Projected sweep runtime exceeds the configured cap.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration; carries the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Field file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracstokes
