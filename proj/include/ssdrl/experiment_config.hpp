#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssdrl/envs.hpp"
#include "ssdrl/learners.hpp"

namespace ssdrl::harness {

enum class ExperimentKind { Regress, Ablate, Evaluate, Control, ComparePolicies };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// One compared agent of a control experiment.
struct MethodSpec {
    std::string name;
    learners::UpdateRule rule = learners::UpdateRule::Wgf;
    learners::LearnerConfig learner;
};

struct RegressionSettings {
    std::vector<std::size_t> sample_counts{5, 10, 20, 50};
    std::size_t reference_samples = 10000;
    std::size_t gradient_steps = 100;
    std::size_t qr_sweeps = 10000;
    double qr_step_size = 0.05;
    wgf::ProximalConfig proximal;
    learners::InitSpec init = learners::InitSpec::normal(0.0, 1.0);
};

struct AblationSettings {
    std::vector<double> min_temperatures{0.01, 0.1, 0.2, 0.25, 0.5, 0.9};
    std::vector<double> h_values{0.01, 0.1, 0.5, 1.0, 10.0};
    std::size_t sample_count = 20;
};

struct EvaluationSettings {
    learners::QLearningConfig q_learning;
    std::size_t rollouts = 200;
    std::size_t depth = 200;
    learners::EvaluationConfig fit;
    std::optional<envs::Cell> state;  // defaults to the start cell
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ComparePolicies;
    nlohmann::json environment;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "results";
    std::size_t threads = 1;
    std::vector<MethodSpec> methods;
    RegressionSettings regression;
    AblationSettings ablation;
    EvaluationSettings evaluation;

    void validate() const;
};

// Settings reproducing the published protocol of each experiment kind.
ExperimentConfig default_experiment(ExperimentKind kind);

// Keys absent from `node` keep the defaults of the kind named by "experiment"
// (or of `fallback` when that key is missing).
ExperimentConfig parse_experiment(const nlohmann::json& node, std::optional<ExperimentKind> fallback = std::nullopt);
ExperimentConfig load_experiment(const std::filesystem::path& path,
                                 std::optional<ExperimentKind> fallback = std::nullopt);

wgf::ProximalConfig parse_proximal(const nlohmann::json& node, wgf::ProximalConfig base);
learners::LearnerConfig parse_learner(const nlohmann::json& node, learners::LearnerConfig base);
learners::InitSpec parse_init(const nlohmann::json& node);
policies::PolicyConfig parse_policy(const nlohmann::json& node, const policies::PolicyConfig& base);

}  // namespace ssdrl::harness
