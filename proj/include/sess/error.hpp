#pragma once

#include <stdexcept>
#include <string>

namespace sess {

enum class ErrorCode {
  InvalidArgument,
  NonFiniteEntry,
  NegativeEntry,
  TooLarge,
  TooSmall,
  DimensionMismatch,
  ZeroVector,
  ShapeMismatch,
  EmptyImage,
  EmptySet,
  NoNodes,
  InvalidGraph,
  InsufficientPairs,
  MissingGraphFile,
  ParseError,
  UnsupportedFormat,
  CorruptFile,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the engine; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sess
