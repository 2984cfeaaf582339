#pragma once

// Scenario configuration files: JSON with a fixed key set. Unknown keys are
// rejected so typos surface as errors instead of silently using defaults.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "noisebench/scenario.hpp"

namespace noisebench {

ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const ScenarioConfig& config);

/// Applies `key=value` overrides to the JSON text before it is decoded.
/// Keys are dotted paths (`noise.seed`, `signals.0.target_snr_db`). The
/// value is read as JSON when it parses, otherwise as a string.
ScenarioConfig parse_config(std::string_view json_text,
                            const std::vector<std::string>& overrides);

/// Human-readable list of every accepted key, for --help.
std::string config_help();

}  // namespace noisebench
