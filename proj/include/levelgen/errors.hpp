#pragma once

#include <stdexcept>
#include <string>

namespace levelgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad magic, unsupported version, or otherwise unrecognizable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File structure is recognizable but its contents are truncated or inconsistent.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Weights parse, but do not describe a usable generator.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int row, int column)
      : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  int row() const noexcept { return row_; }
  int column() const noexcept { return column_; }

 private:
  int row_;
  int column_;
};

}  // namespace levelgen
