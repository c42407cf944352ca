#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pforge {

// Axis, index, or interval outside the extents of a tensor.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Shape mismatch or a value that violates a type invariant.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An operation's documented precondition does not hold for its inputs.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input exceeds what an oracle-grade routine is willing to process.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checked construction produced an output that fails its own guarantee.
// Seeing this means there is a bug in the implementation.
class VerificationFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A decision procedure ran out of budget where a definite answer was required.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pforge
