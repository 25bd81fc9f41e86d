#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpsim {

enum class ErrorKind {
  Io,
  Parse,
  Decode,
  Manifest,
  Parameter,
  EmptyMesh,
  Patch,
  Feature,
  Scoring,
  Fit,
  Correlation,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Base of every error raised by the library. The kind drives CLI exit codes:
// Io/Parse/Decode/Manifest are input errors, the rest are processing errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  bool is_input_error() const noexcept;

 private:
  ErrorKind kind_;
};

// Error tied to a 1-based line (OBJ) or data row (CSV).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Re-raises `e` with the pipeline stage prepended to its message.
[[noreturn]] void rethrow_with_stage(const Error& e, std::string_view stage);

}  // namespace gpsim
