#pragma once

#include <stdexcept>
#include <string>

namespace hbpk {

/// Invalid configuration or malformed input data.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total weight degeneracy, likelihood underflow or a chain that never
/// moved. Callers map this to exit code 2.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hbpk
