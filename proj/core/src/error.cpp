#include "gpsim/error.hpp"

namespace gpsim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Decode: return "decode";
    case ErrorKind::Manifest: return "manifest";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::EmptyMesh: return "empty-mesh";
    case ErrorKind::Patch: return "patch";
    case ErrorKind::Feature: return "feature";
    case ErrorKind::Scoring: return "scoring";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Correlation: return "correlation";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

bool Error::is_input_error() const noexcept {
  switch (kind_) {
    case ErrorKind::Io:
    case ErrorKind::Parse:
    case ErrorKind::Decode:
    case ErrorKind::Manifest:
      return true;
    default:
      return false;
  }
}

ParseError::ParseError(ErrorKind kind, std::size_t line, const std::string& message)
    : Error(kind, (kind == ErrorKind::Manifest ? "row " : "line ") + std::to_string(line) + ": " +
                      message),
      line_(line) {}

void rethrow_with_stage(const Error& e, std::string_view stage) {
  throw Error(e.kind(), std::string(stage) + ": " + e.what());
}

}  // namespace gpsim
