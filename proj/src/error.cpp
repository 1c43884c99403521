#include "cdr/error.hpp"

namespace cdr {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::config: return "config";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::range: return "range";
    case ErrorCategory::data: return "data";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

}  // namespace cdr
