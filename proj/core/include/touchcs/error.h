#pragma once

#include <stdexcept>
#include <string>

namespace touchcs {

// Vector/matrix shapes that do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A config file or command-line value that fails validation. `key()` names
// the offending setting, when there is one.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// No threshold on the sweep reached the required recall, so an energy
// saving figure would be meaningless.
class RecallConstraintUnmet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace touchcs
