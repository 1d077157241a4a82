#include "nlslab/error.hpp"

namespace nlslab {

const char* to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::invalid_argument:
      return "invalid-argument";
    case ErrorCategory::convergence:
      return "convergence";
    case ErrorCategory::io:
      return "io";
    case ErrorCategory::numerical:
      return "numerical";
  }
  return "unknown";
}

Error::Error(ErrorCategory category, const std::string& message)
    : std::runtime_error(message), category_(category) {}

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& message)
    : Error(ErrorCategory::io, path + ":" + std::to_string(line) + ": " + message),
      path_(path),
      line_(line) {}

void throw_invalid(const std::string& message) {
  throw Error(ErrorCategory::invalid_argument, message);
}

}  // namespace nlslab
