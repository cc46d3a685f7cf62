#pragma once

#include <stdexcept>
#include <string>

namespace loggas {

// Bad input or violated precondition (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-convergence, branch trouble, precision loss (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A traced critical graph does not match the expected template (CLI exit code 4).
class TopologyMismatch : public std::runtime_error {
 public:
  TopologyMismatch(const std::string& what, std::string expected, std::string found)
      : std::runtime_error(what), expected_(std::move(expected)), found_(std::move(found)) {}
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::string expected_;
  std::string found_;
};

}  // namespace loggas
