// Complete configuration: machine parameters plus host pipeline settings.
// Loads from / saves to JSON; every key is optional and defaults apply.

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "scribe/machine_model.hpp"

namespace scribe {

struct HostConfig {
  std::size_t chars_per_line = 28;
  double letter_height_mm = 8.0;
  double line_spacing_mm = 12.0;
  double lift_height_mm = 2.0;    // above the paper surface
  double writing_depth_mm = 0.5;  // below first contact
  bool compensation_enabled = true;
  // Unset means "match the machine's flex parameters".
  std::optional<double> compensation_gain_mm_per_mm;
  std::optional<double> compensation_knee_mm;
  bool strict_glyphs = false;

  void validate() const;
  bool operator==(const HostConfig&) const = default;
};

struct Config {
  MachineConfig machine;
  HostConfig host;

  void validate() const {
    machine.validate();
    host.validate();
  }
  bool operator==(const Config&) const = default;
};

nlohmann::json to_json(const Config& config);
/// Overlays `j` onto the defaults. Unknown keys are rejected.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);

/// Path from --config, else $SCRIBE_CONFIG, else defaults.
Config resolve_config(const std::optional<std::string>& flag_path);

}  // namespace scribe
