#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skconf {

enum class ErrorKind {
  // validation of domain objects
  NegativeEntry,
  NonFiniteEntry,
  ColumnSumViolation,
  DimensionMismatch,
  EmptyTrace,
  LengthMismatch,
  AlphabetMismatch,
  InvalidArgument,
  // operation preconditions
  ExplosionGuard,
  EmptyVector,
  EmptyModel,
  EmptyLog,
  EmptyPairs,
  EmptyModelList,
  NoLengthCompatibleTrace,
  // ingest
  SyntaxError,
  UnknownLabel,
  ZeroFrequency,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Syntax and I/O failures are reported with exit code 2 by the CLI, all other
// kinds with exit code 1.
constexpr bool is_input_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::SyntaxError || kind == ErrorKind::IoError;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  // Location-carrying form used by the parsers; line and column are 1-based,
  // 0 means unknown.
  Error(ErrorKind kind, const std::string& message, std::size_t line,
        std::size_t column);

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace skconf
