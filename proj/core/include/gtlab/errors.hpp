#pragma once

#include <stdexcept>
#include <string>

namespace gtlab {

// Invalid arguments are reported with std::invalid_argument; the types below
// cover the remaining failure classes callers need to tell apart.

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gtlab
