#pragma once

#include <stdexcept>
#include <string>

namespace propagate {

// Invalid user-supplied configuration or parameters (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime: divergence, blowup, non-convergence (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace propagate
