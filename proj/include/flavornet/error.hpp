#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flavornet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid input that violates a data-model invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Must-link / cannot-link sets that cannot be satisfied together.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// A score was requested over a corpus with no scorable recipe.
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace flavornet
