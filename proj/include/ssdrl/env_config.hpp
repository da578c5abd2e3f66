#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ssdrl/envs.hpp"

namespace ssdrl::envs {

// Names of the built-in environment configurations.
std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

// A string names a preset; an object with a "preset" key is that preset with
// the object's remaining keys merged over it; any other object is taken as is.
nlohmann::json resolve_environment(const nlohmann::json& node);

GridSpec parse_grid_spec(const nlohmann::json& node);
GmmSpec parse_gmm_spec(const nlohmann::json& node);
RewardSpec parse_reward_spec(const nlohmann::json& node);

}  // namespace ssdrl::envs
