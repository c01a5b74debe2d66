#pragma once

#include <stdexcept>
#include <string>

namespace airbench {

/// Base class for all library errors. The `exit_code` groups errors the way
/// the CLI reports them: 2 usage/config, 3 input, 4 provider, 5 integrity.
class Error : public std::runtime_error {
 public:
  Error(std::string message, int exit_code)
      : std::runtime_error(std::move(message)), exit_code_(exit_code) {}

  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Invalid configuration or flag values (exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(message, 2) {}
};

/// Missing or malformed input data (exit code 3).
class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error(message, 3) {}
};

/// Malformed record in an input file; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : InputError(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A model service failed after exhausting retries, or replied with
/// something the caller cannot use (exit code 4).
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& message) : Error(message, 4) {}
};

/// Cross-record consistency violation: duplicate ids, dangling references,
/// set membership that contradicts the declared document class (exit code 5).
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message) : Error(message, 5) {}
};

}  // namespace airbench
