#pragma once

#include <string>
#include <vector>

#include "grail/experiment.hpp"

namespace grail {

// Enum spellings shared by the JSON schema and the CLI flags.
std::string backend_kind_name(SkillBackendKind kind);
std::string observation_mode_name(ObservationMode mode);
std::string reset_mode_name(ResetMode mode);
SelectorKind parse_selector_kind(const std::string& name);     // throws ConfigError
SkillBackendKind parse_backend_kind(const std::string& name);  // throws ConfigError
ObservationMode parse_observation_mode(const std::string& name);
ResetMode parse_reset_mode(const std::string& name);

// 33 probe attempts for the stochastic Abstract backend, 1 for the
// deterministic ActorCritic exploit policy.
int default_eval_attempts(SkillBackendKind kind);

// Strict deserialization: unknown keys are rejected, wrong types are
// rejected, every field has a default. Errors raise ConfigError with the
// offending location. The result is not validated; call validate() before
// running.
ExperimentConfig config_from_json_text(const std::string& text);

// Canonical full echo of a configuration, suitable for config.resolved.json;
// parsing it back yields an equal config.
std::string config_to_json_text(const ExperimentConfig& config);

// Compiled-in experiment setups.
std::vector<std::string> preset_names();
ExperimentConfig make_preset(const std::string& name);  // throws ConfigError
std::string describe_preset(const std::string& name);

}  // namespace grail
