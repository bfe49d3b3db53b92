#pragma once

#include <stdexcept>
#include <string>

namespace tsbench {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with input data: unreadable files, malformed records, shape
/// mismatches, degenerate statistics. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : DataError(what) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_{0};
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

class SizeError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

/// Mathematically undefined request (empty series where one is required,
/// zero-denominator ratios).
class DomainError : public DataError {
 public:
  using DataError::DataError;
};

class BoundsError : public DataError {
 public:
  using DataError::DataError;
};

/// Invalid configuration or API misuse. The CLI maps these to exit code 3.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A fold plan in which a tuning or training item also appears in the testing
/// set.
class HygieneError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsbench
