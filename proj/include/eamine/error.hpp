#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eamine {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

/// Required column / field missing from a structured input.
class SchemaError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class NotFound : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Invariant violation inside the pipeline. Never expected on valid input.
class IntegrityError : public Error {
public:
  using Error::Error;
};

} // namespace eamine
