#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qperc {

/// A numeric argument fell outside the domain of a formula or type invariant.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation was invoked on a state that does not satisfy its precondition
/// (inactive component, merging a non-connectable pair, reducing a component
/// that can still reach a neighbor).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input data passed parsing but violates a structural rule.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qperc
