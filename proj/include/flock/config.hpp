#pragma once

#include <string>

#include "flock/scenario.hpp"

namespace flock {

// Flat `key = value` documents; '#' starts a comment; keys are dot-namespaced.
// Parsing overlays the document onto `base`, so builtins can be refined by a
// file and then by --override assignments.
ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base);
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base);

// assignment is "key=value"; throws ConfigError for unknown keys or bad values
void apply_override(ScenarioConfig& config, const std::string& assignment);

// Every effective key/value, serialized deterministically (17 significant
// digits); written next to the outputs and sufficient to replay the run.
std::string config_echo(const ScenarioConfig& config);

} // namespace flock
