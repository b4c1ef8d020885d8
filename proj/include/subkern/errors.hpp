#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subkern {

/// Malformed or inconsistent input data (files, rankings, features).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ranking string failed to parse; offset is the byte position of the fault.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// An exact enumeration would exceed the caller's size budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorization or solve failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subkern
