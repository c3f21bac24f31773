#pragma once

#include <stdexcept>
#include <string>

namespace kcluster {

// Exit-code mapping for the CLI lives in tools/; the library only
// distinguishes the failure classes below.

// Bad user-supplied parameter (eps out of range, rho out of range, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structurally inconsistent inputs (dimension mismatch, unknown cell id, ...).
struct structural_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Valid inputs outside an operation's domain (empty center set, all points
// identical, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Enumeration caps exceeded (brute force refuses oversized instances).
struct size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files; carries the 1-based line number.
struct parse_error : std::runtime_error {
    parse_error(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_number(line) {}
    long line_number;
};

// Internal assertion failures (DP found no feasible root state, ...).
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace kcluster
