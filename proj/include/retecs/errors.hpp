#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retecs {

// Base for everything the library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with user-supplied data (files, datasets, logs). The CLI maps
// these to exit code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// A test id was looked up in a schedule or cycle log that does not hold it.
class LookupError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Caller broke an operation's precondition (dimension mismatch, empty batch,
// APFD on a result with undetected failures, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace retecs
