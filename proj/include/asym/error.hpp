#pragma once

#include <stdexcept>
#include <string>

namespace asym {

/// Thrown when an argument violates an operation's preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when persisted data (datasets, checkpoints, reports) is malformed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an iterative procedure exceeds its step budget.
class NonTerminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace asym
