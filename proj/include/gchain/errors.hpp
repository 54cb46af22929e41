#pragma once

#include <stdexcept>
#include <string>

namespace gchain {

// Base for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An enumeration or state space would exceed its configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is malformed (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace gchain
