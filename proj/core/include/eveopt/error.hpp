#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace eveopt {

/// Raised when a caller violates an operation's precondition (shape
/// mismatch, out-of-range hyperparameter, t = 0 in bias correction, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a loss or gradient component is NaN or infinite. A step
/// that raises this leaves the caller's state untouched.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), index_(index) {}

  /// Offending vector component, when the failure came from a vector.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eveopt
