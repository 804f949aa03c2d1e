#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace armub {

/// Input outside an operation's mathematical domain (bad order, non-prime field size, t too large).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact arithmetic failure: division by zero, singular matrix, vanishing denominator.
class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands that cannot be combined (different radicands, mismatched shapes).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configured size or search budget was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No generator combination reaches the requested Hadamard order.
class NotConstructibleError : public std::runtime_error {
 public:
  NotConstructibleError(const std::string& what, std::vector<int> attempted)
      : std::runtime_error(what), attempted_(std::move(attempted)) {}

  const std::vector<int>& attempted() const noexcept { return attempted_; }

 private:
  std::vector<int> attempted_;
};

/// Malformed or inconsistent serialized artifact.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace armub
