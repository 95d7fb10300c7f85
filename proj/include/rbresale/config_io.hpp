#pragma once

// Flat `key = value` configuration files.
//
//   # comment
//   slots = 4320
//   noise_dbm = -96          # dBm, stored as watts
//   hb.arrival_mean = 108 Mb # sizes need a unit: b, kb, Mb or Gb (decimal)
//
// Keys not listed in config_keys() are rejected. Population classes are
// written as `hb.*` and `lr.*` groups and every group must be complete.
// Keys that are left out keep the ScenarioConfig defaults.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rbresale/scenario.hpp"

namespace rbresale {

struct ConfigKey {
  std::string name;
  std::string unit;  // empty for dimensionless values
  std::string help;
};

/// Every accepted key, in the order format_config writes them.
const std::vector<ConfigKey>& config_keys();

/// Parses and validates. Errors carry the 1-based line number when one applies.
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Writes every key, so that parse_config_text(format_config(c)) == c.
std::string format_config(const ScenarioConfig& cfg);

/// %.17g; reads back to the same double.
std::string format_double(double v);

}  // namespace rbresale
