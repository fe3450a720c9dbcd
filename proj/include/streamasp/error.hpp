#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamasp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Semantically invalid input: dangling references, duplicates, bad ranges.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A step was added out of order, or a manifestation targets the wrong step.
class StepOrderError : public Error {
 public:
  using Error::Error;
};

/// A sensor value outside every declared range of its sensor.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// The bundled solver only handles locally stratified programs.
class UnsupportedProgram : public Error {
 public:
  using Error::Error;
};

/// The brute-force oracle refuses programs it cannot enumerate.
class AtomBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace streamasp
