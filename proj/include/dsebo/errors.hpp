#pragma once

#include <stdexcept>
#include <string>

namespace dsebo {

// Invalid run configuration: bad dimension ranges, unknown registry names,
// malformed config files. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: dimension mismatches and violated call preconditions.
class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite observations or otherwise unusable data. CLI exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Linear-algebra breakdown that survived all recovery attempts. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dsebo
