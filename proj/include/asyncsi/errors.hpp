#pragma once

#include <stdexcept>
#include <string>

namespace asyncsi {

// Violated enumeration / codebook-size / grid-size budget.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed channel spec file or channel shorthand.
class SpecParseError : public std::runtime_error {
 public:
  explicit SpecParseError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace asyncsi
