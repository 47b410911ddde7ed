// Error taxonomy shared by the library and the command-line driver.
// Each class maps to a distinct process exit code so scripted callers can
// distinguish "your input is bad" from "the request is too expensive" from
// "the tool itself is broken".
#pragma once

#include <stdexcept>
#include <string>

namespace primeforms {

// Malformed system file / config / CLI input.  Exit code 2.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a documented requirement
// (non-homogeneous form, degree < 2, bad profile, ...).  Exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested computation exceeds an explicit resource budget; the message
// carries the cost estimate so the caller can decide what to do.  Exit code 3.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invariant violation inside the library itself.  Exit code 4.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace primeforms
