#pragma once

// Scenario files: flat "key = value" text with dotted keys.
//
//   # comment
//   scenario.dt = 0.01
//   [gains]            # optional section prefix for the following keys
//   K_omega = 5
//
// Files are complete: every key must appear exactly once and unknown keys
// are rejected. Vectors are three (quaternions four, inertia nine) numbers
// separated by commas or spaces. Booleans are on/off. Pulses are a
// semicolon-separated list of "start duration ax ay az" entries.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppcatt/simulator.hpp"

namespace ppcatt {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// All keys in file order.
const std::vector<std::string>& config_keys();

/// Exact key, or the unique key whose last dotted component is `name`.
/// Throws ConfigError for unknown or ambiguous names.
std::string resolve_key(std::string_view name);

std::string get_config_value(const Scenario& s, const std::string& key);
/// Throws ConfigError naming the key on unknown keys or malformed values.
void set_config_value(Scenario& s, const std::string& key, const std::string& value);

Scenario parse_config(std::string_view text, const std::string& source = "<config>");
Scenario load_config(const std::filesystem::path& path);

/// Complete file that parses back to an identical scenario.
std::string dump_config(const Scenario& s);

}  // namespace ppcatt
