#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite samples, wrong component counts, malformed coefficient arrays.
class InvalidFieldError : public Error {
 public:
  using Error::Error;
};

/// Coefficients whose inverse transform would not be real-valued.
class SymmetryViolationError : public Error {
 public:
  using Error::Error;
};

class InvalidExponentError : public Error {
 public:
  using Error::Error;
};

class IncompatibleGridsError : public Error {
 public:
  using Error::Error;
};

/// An operator precondition (e.g. divergence-free input) does not hold.
class ContractViolationError : public Error {
 public:
  using Error::Error;
};

/// A check or constant requested outside the exponent/parameter regime it covers.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration problems. `key` names the offending entry ("params.mu"),
/// `line`/`column` are 1-based and zero when not applicable.
class ConfigError : public Error {
 public:
  ConfigError(std::string message, std::string key = {}, int line = 0, int column = 0)
      : Error(std::move(message)), key_(std::move(key)), line_(line), column_(column) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

}  // namespace cbf
