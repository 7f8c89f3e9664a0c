#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

// Precondition violated by a caller-supplied value (non-Hermitian matrix,
// non-unit Bloch vector, h <= 0, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A run produced non-finite values or otherwise could not continue.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration. `key` is the dotted path of the offending
// entry, e.g. "grid.nR".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hqc
