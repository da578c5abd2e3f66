#include "ssdrl/env_config.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "ssdrl/errors.hpp"

namespace ssdrl::envs {

namespace {

// Sutton & Barto cliff walk, 4x12, with a 5% chance of falling from cliff-adjacent cells.
constexpr const char* kCliffwalkStandard = R"({
  "type": "gridworld",
  "rows": 4, "cols": 12,
  "start": [3, 0], "goal": [3, 11],
  "cliff": [{"row": 3, "from_col": 1, "to_col": 10}],
  "slip_probability": 0.05,
  "cliff_penalty": -100.0,
  "gamma": 0.9,
  "horizon": 500,
  "rewards": {"default": {"type": "deterministic", "value": -1.0}, "regions": []}
})";

// Two equally valued routes: the top row is deterministic and cheaper per
// step so the 17-step detour matches the 13-step route along the cliff, whose
// cells pay Gaussian rewards.
constexpr const char* kCliffwalkModified = R"({
  "type": "gridworld",
  "rows": 4, "cols": 12,
  "start": [3, 0], "goal": [3, 11],
  "cliff": [{"row": 3, "from_col": 1, "to_col": 10}],
  "slip_probability": 0.0,
  "cliff_penalty": -100.0,
  "gamma": 1.0,
  "horizon": 500,
  "rewards": {
    "default": {"type": "deterministic", "value": -1.0},
    "regions": [
      {"rows": [0, 0], "cols": [0, 11], "reward": {"type": "deterministic", "value": -0.6666666666666666}},
      {"rows": [2, 2], "cols": [1, 10], "reward": {"type": "gaussian", "mean": -1.0, "std": 0.001, "clip": [-10.0, 10.0]}}
    ]
  }
})";

constexpr const char* kGmmPaper = R"({
  "type": "gmm",
  "weights": [0.2, 0.2, 0.2, 0.2, 0.2],
  "means": [-5.0, -3.0, 0.0, 5.0, 6.0],
  "stds": [1.0, 2.0, 1.0, 2.0, 1.0]
})";

const std::map<std::string, const char*>& presets() {
    static const std::map<std::string, const char*> table{
        {"cliffwalk-standard", kCliffwalkStandard},
        {"cliffwalk-modified", kCliffwalkModified},
        {"gmm-paper", kGmmPaper},
    };
    return table;
}

Cell parse_cell(const nlohmann::json& node) {
    if (!node.is_array() || node.size() != 2) {
        throw ConfigError("cell must be a [row, col] pair");
    }
    return Cell{node[0].get<int>(), node[1].get<int>()};
}

template <typename T>
T required(const nlohmann::json& node, const char* key) {
    if (!node.contains(key)) {
        throw ConfigError(std::string("missing key '") + key + "'");
    }
    return node.at(key).get<T>();
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, _] : presets()) {
        out.push_back(name);
    }
    return out;
}

nlohmann::json preset(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw ConfigError("unknown environment preset '" + name + "'");
    }
    return nlohmann::json::parse(it->second);
}

nlohmann::json resolve_environment(const nlohmann::json& node) {
    if (node.is_string()) {
        return preset(node.get<std::string>());
    }
    if (!node.is_object()) {
        throw ConfigError("environment must be a preset name or an object");
    }
    if (!node.contains("preset")) {
        return node;
    }
    auto base = preset(node.at("preset").get<std::string>());
    auto overrides = node;
    overrides.erase("preset");
    base.merge_patch(overrides);
    return base;
}

RewardSpec parse_reward_spec(const nlohmann::json& node) {
    const auto type = required<std::string>(node, "type");
    if (type == "deterministic") {
        return RewardSpec::deterministic(required<double>(node, "value"));
    }
    if (type == "gaussian") {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        if (node.contains("clip")) {
            lo = node.at("clip").at(0).get<double>();
            hi = node.at("clip").at(1).get<double>();
        }
        return RewardSpec::gaussian(required<double>(node, "mean"), required<double>(node, "std"), lo, hi);
    }
    throw ConfigError("unknown reward type '" + type + "'");
}

GridSpec parse_grid_spec(const nlohmann::json& raw) {
    try {
        const auto node = resolve_environment(raw);
        if (node.value("type", std::string("gridworld")) != "gridworld") {
            throw ConfigError("environment is not a gridworld");
        }
        GridSpec spec;
        spec.rows = required<int>(node, "rows");
        spec.cols = required<int>(node, "cols");
        spec.start = parse_cell(node.at("start"));
        spec.goal = parse_cell(node.at("goal"));
        for (const auto& seg : node.value("cliff", nlohmann::json::array())) {
            const int row = required<int>(seg, "row");
            for (int c = required<int>(seg, "from_col"); c <= required<int>(seg, "to_col"); ++c) {
                spec.cliff_cells.insert(Cell{row, c});
            }
        }
        spec.slip_probability = node.value("slip_probability", 0.0);
        spec.cliff_penalty = node.value("cliff_penalty", -100.0);
        spec.gamma = node.value("gamma", 1.0);
        spec.horizon = node.value("horizon", std::size_t{500});

        const auto& rewards = node.at("rewards");
        spec.rewards.assign(static_cast<std::size_t>(spec.rows * spec.cols), parse_reward_spec(rewards.at("default")));
        for (const auto& region : rewards.value("regions", nlohmann::json::array())) {
            const auto reward = parse_reward_spec(region.at("reward"));
            const int r0 = region.at("rows").at(0).get<int>();
            const int r1 = region.at("rows").at(1).get<int>();
            const int c0 = region.at("cols").at(0).get<int>();
            const int c1 = region.at("cols").at(1).get<int>();
            for (int r = std::max(r0, 0); r <= std::min(r1, spec.rows - 1); ++r) {
                for (int c = std::max(c0, 0); c <= std::min(c1, spec.cols - 1); ++c) {
                    spec.rewards[static_cast<std::size_t>(r * spec.cols + c)] = reward;
                }
            }
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid gridworld config: ") + e.what());
    }
}

GmmSpec parse_gmm_spec(const nlohmann::json& raw) {
    try {
        const auto node = resolve_environment(raw);
        if (node.value("type", std::string("gmm")) != "gmm") {
            throw ConfigError("environment is not a mixture source");
        }
        GmmSpec spec{required<std::vector<double>>(node, "weights"), required<std::vector<double>>(node, "means"),
                     required<std::vector<double>>(node, "stds")};
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid mixture config: ") + e.what());
    }
}

}  // namespace ssdrl::envs
