#pragma once

#include <stdexcept>
#include <string>

namespace symmimic {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document could not be read or parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration (unknown keys, out-of-range settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing or unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The simulation produced non-finite values.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace symmimic
