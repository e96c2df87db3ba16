#pragma once

#include <stdexcept>

namespace fedshot {

// Configuration and input-schema problems. The CLI maps these to exit code 1;
// everything else thrown from the library is a runtime failure (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedshot
