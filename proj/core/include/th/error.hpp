#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace th {

enum class ErrorKind {
  Parse,
  Domain,
  Scene,
  DegenerateContact,
  EscapedBbox,
  NonTraversing,
  CurveExtraction,
  InconsistentQuotient,
  UnmatchedClass,
  OrderViolation,
  Unsupported,
  DimensionCap,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the library. The kind lets callers map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::Parse,
              "parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace th
