#pragma once

#include <stdexcept>
#include <string>

namespace fedledger {

// Base of every error raised by the library. The CLI maps the subclasses
// onto process exit codes (config 1, data 2, everything else 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or invariant violation. `pointer` is a JSON pointer
// into the run configuration when the error originates there.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string pointer = {})
      : Error(pointer.empty() ? what : pointer + ": " + what),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// Problems with input data: I/O, CSV schema, encoding, missing departments.
class DataError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Violations of the client/server exchange contract (empty rounds, shape
// drift between client updates, partial participation where forbidden).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class InjectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedledger
