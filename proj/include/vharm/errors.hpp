#pragma once

#include <stdexcept>
#include <string>

namespace vharm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigurationError : public Error {
 public:
  using Error::Error;
};

class CutLocusError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfigurationError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem tied to a location in a key-value file.
class ValidationError : public Error {
 public:
  ValidationError(int line, std::string field, const std::string& message)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + message),
        line_(line),
        field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace vharm
