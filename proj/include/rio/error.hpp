#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rio {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid user input (KB text, alignment CSV, configuration).
class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error(message) {}
  InputError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

/// The instance has nothing to diagnose, or no diagnosis satisfies a constraint.
class NoDiagnosisError : public Error {
 public:
  using Error::Error;
};

/// A configured search or solver budget was exhausted. Never means "false".
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace rio
