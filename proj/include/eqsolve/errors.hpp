#pragma once

#include <stdexcept>
#include <string>

namespace eqsolve {

enum class ErrorKind {
  Input,          // malformed input data or file
  Contract,       // caller violated an operation precondition
  SizeLimit,      // brute-force oracle refused an oversized instance
  Evaluation,     // domain error during point evaluation (div by zero, sqrt of negative)
  SplitRequired,  // interval division by an interval containing zero
  Usage,          // bad CLI/solver usage (unbound free parameter, structural-only solve, ...)
  Resource,       // configured budget exceeded
  Internal,       // invariant violation; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(ErrorKind::Input,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace eqsolve
