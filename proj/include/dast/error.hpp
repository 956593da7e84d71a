#pragma once

#include <stdexcept>
#include <string>

namespace dast {

// Raised for any input that violates a data-model contract. The CLI maps it
// to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerical procedure fails (e.g. training diverges).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dast
