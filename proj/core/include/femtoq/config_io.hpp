#pragma once

// JSON forms of the configuration types. Keys mirror the struct field names;
// unknown keys are rejected so that a typo cannot silently fall back to a
// default.

#include "femtoq/sim_harness.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace femtoq {

nlohmann::json to_json(const RewardSpec& r);
RewardSpec reward_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LearningParams& p);
LearningParams learning_params_from_json(const nlohmann::json& j);

/// Full-precision coordinates (the text form keeps only 6 digits).
nlohmann::json to_json(const Topology& t);
Topology topology_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SimConfig& cfg);
/// Missing keys keep their defaults. "topology_file" is resolved relative to
/// `base_dir` and loaded with topology_from_text.
SimConfig sim_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

/// Throws std::invalid_argument naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where);

std::string read_file(const std::string& path);

}  // namespace femtoq
