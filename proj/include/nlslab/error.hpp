#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlslab {

/// Failure classes. The numeric values double as CLI exit codes.
enum class ErrorCategory : int {
  invalid_argument = 2,
  convergence = 3,
  io = 4,
  numerical = 5,
};

const char* to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message);

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& message);

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

[[noreturn]] void throw_invalid(const std::string& message);

}  // namespace nlslab
