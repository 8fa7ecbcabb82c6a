#pragma once

#include <stdexcept>
#include <string>

namespace gridrl {

// Raised when a requested terminal power exceeds what the equivalent circuit
// can deliver (negative discriminant of the power balance quadratic).
class InfeasiblePowerError : public std::runtime_error {
public:
  explicit InfeasiblePowerError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration / user-input problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridrl
