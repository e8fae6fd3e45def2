#pragma once

#include <stdexcept>
#include <string>

namespace tou {

enum class ErrorKind {
  Domain,
  Range,
  InsufficientData,
  NonpositiveThreshold,
  SingularFit,
  UndefinedCorrelation,
  DegenerateCopula,
  UnsupportedSide,
  IndeterminateDomination,
  InvalidParameter,
  Parse,
  EmptyInput,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every library failure; `kind()` identifies the
/// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tou
