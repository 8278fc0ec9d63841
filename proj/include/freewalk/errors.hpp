#pragma once

#include <stdexcept>
#include <string>

namespace freewalk {

/// Argument outside the mathematical domain of an operation (zero vector,
/// eps outside ]0,1[, r <= 2 eps, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called in a mode it does not support (valuation of a real
/// scalar, exact oracle on floating-point entries, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a structural invariant (non-unimodular matrix,
/// probabilities not summing to one, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or data file.  `where` names the file, line or
/// JSON field that failed.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace freewalk
