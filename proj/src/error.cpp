#include "skconf/error.hpp"

namespace skconf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::ColumnSumViolation: return "ColumnSumViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ExplosionGuard: return "ExplosionGuard";
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::EmptyModel: return "EmptyModel";
    case ErrorKind::EmptyLog: return "EmptyLog";
    case ErrorKind::EmptyPairs: return "EmptyPairs";
    case ErrorKind::EmptyModelList: return "EmptyModelList";
    case ErrorKind::NoLengthCompatibleTrace: return "NoLengthCompatibleTrace";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::ZeroFrequency: return "ZeroFrequency";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

namespace {
std::string with_location(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  std::string out = "line " + std::to_string(line);
  if (column != 0) out += ", column " + std::to_string(column);
  return out + ": " + message;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(with_location(message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

}  // namespace skconf
