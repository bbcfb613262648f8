#pragma once

#include <stdexcept>
#include <string>

namespace qmnls {

/// Invalid run parameters or config file contents (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on data in the wrong state (e.g. wrong space tag).
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Non-finite values, failed convergence and similar run-time numerical
/// failures (CLI exit code 1).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public NumericalError {
public:
  QuadratureError(const std::string& what, double achieved)
      : NumericalError(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

}  // namespace qmnls
