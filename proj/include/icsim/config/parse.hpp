#pragma once

#include <stdexcept>
#include <string>

#include "icsim/config/model.hpp"

namespace icsim::config {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed JSON text; message carries the parser's position report.
class SyntaxError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// A key the schema does not define. Unknown keys are hard errors: a silent
// typo in a security experiment's config corrupts the experiment.
class UnknownKeyError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class TypeMismatchError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// A key that exists in the schema but is not allowed for this device kind
// (e.g. `logic` on a sensor).
class KindPropertyError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config_file(const std::string& path);

// Canonical JSON rendering; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimulationConfig& config);

}  // namespace icsim::config
