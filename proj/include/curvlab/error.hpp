#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(std::string symbol)
      : Error("unknown symbol \"" + symbol + "\""), symbol_(std::move(symbol)) {}

  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Evaluation left the domain of an operation (division by zero, sqrt of a
/// negative value). `subexpression` is the pretty-printed offending node.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string subexpression)
      : Error(message + ": " + subexpression),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Shape, order or dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the geometry failed (singular metric, point outside chart).
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvlab
