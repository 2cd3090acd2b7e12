#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

using Letter = std::uint16_t;
using Word   = std::vector<Letter>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed automaton definition file.
class ParseError : public Error {
 public:
  ParseError(int line, std::string const& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class AlphabetMismatch : public Error {
 public:
  AlphabetMismatch(std::size_t a, std::size_t b)
      : Error("alphabet mismatch: degree " + std::to_string(a) + " vs "
              + std::to_string(b)) {}
};

// A computation would exceed its configured size or time budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Raised when an internal cross-check fails; always indicates a bug.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace selfsim
