#pragma once

#include <stdexcept>
#include <string>

namespace utcc {

// Raised when an operation is applied outside its contract (mixed-system
// operands, non-admissible substitutions, malformed configs, ...).
struct UsageError : std::invalid_argument {
  explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Raised when an internal invariant is broken (e.g. a fixpoint that fails
// to stabilize within its proven bound).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

// Positioned syntax error for program and constraint text.
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_), column(col_) {}
};

inline void check_usage(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

inline void check_internal(bool ok, const std::string& msg) {
  if (!ok) throw InternalError(msg);
}

}  // namespace utcc
