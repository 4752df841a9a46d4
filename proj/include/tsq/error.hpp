#pragma once

#include <stdexcept>
#include <string>

namespace tsq {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed textual input; positions are 1-based.
struct parse_error : error {
    int line;
    int column;
    parse_error(const std::string& what, int line_, int column_)
        : error(what + " (line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

// Structured input violates a documented precondition or invariant.
struct domain_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

// Stored data is internally inconsistent (bad run file, record mismatch).
struct corruption_error : error {
    using error::error;
};

// A counting cross-check failed; signals a bug, not bad input.
struct audit_error : error {
    using error::error;
};

// Request outside the supported range; refused rather than attempted.
struct limit_error : error {
    using error::error;
};

}  // namespace tsq
