#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

// Bad or unsupported configuration / arguments supplied by the caller.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested computation exceeds a declared budget (enumeration count,
// table cap, iteration cap). The CLI maps this to exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gibbs
