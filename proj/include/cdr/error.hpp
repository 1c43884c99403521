#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdr {

/// Coarse failure classes. The CLI prints the category as a stable token so
/// callers can branch on it without parsing the message.
enum class ErrorCategory { usage, config, parse, range, data, io };

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorCategory::parse, m) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& m) : Error(ErrorCategory::range, m) {}
};

struct DataError : Error {
  explicit DataError(const std::string& m) : Error(ErrorCategory::data, m) {}
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};

}  // namespace cdr
