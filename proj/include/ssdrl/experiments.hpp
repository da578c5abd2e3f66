#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssdrl/csv.hpp"
#include "ssdrl/experiment_config.hpp"

namespace ssdrl::harness {

// A trial raised; carries which one so the run can be reproduced.
class TrialFailure : public std::runtime_error {
public:
    TrialFailure(const std::string& method, std::size_t trial, std::uint64_t seed, const std::string& what)
        : std::runtime_error("method " + method + ", trial " + std::to_string(trial) + " (seed " +
                             std::to_string(seed) + "): " + what),
          method_(method), trial_(trial), seed_(seed) {}

    const std::string& method() const noexcept { return method_; }
    std::size_t trial() const noexcept { return trial_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::string method_;
    std::size_t trial_;
    std::uint64_t seed_;
};

// Raw CSV column sets, one per experiment kind.
const std::vector<std::string>& control_columns();
const std::vector<std::string>& evaluation_columns();
const std::vector<std::string>& regression_columns();
const std::vector<std::string>& ablation_columns();

Table control_trial(const envs::GridWorld& env, const MethodSpec& method, std::uint64_t seed);
Table evaluation_trial(const envs::GridWorld& env, const EvaluationSettings& settings, std::uint64_t seed);
// One row per sample count. `rule` picks the fitted method; both rules see the same draws for a seed.
Table regression_trial(const envs::GmmSpec& source, const RegressionSettings& settings, learners::UpdateRule rule,
                       std::uint64_t seed);
// One row per (min temperature, h) cell, WGF only.
Table ablation_trial(const envs::GmmSpec& source, const RegressionSettings& settings,
                     const AblationSettings& grid, std::uint64_t seed);

// Row-wise mean and 95% half-width of every column across trials ("<c>_mean",
// "<c>_half_width"); half-widths are zero for a single trial.
Table aggregate(const std::vector<Table>& trials);

struct MethodResult {
    std::string name;
    std::vector<Table> trials;
    Table aggregate;
};

struct ExperimentResult {
    std::vector<MethodResult> methods;
    std::vector<std::filesystem::path> files;  // written outputs, in write order

    const MethodResult& method(const std::string& name) const;
};

struct RunOptions {
    bool write_outputs = true;
    std::ostream* log = nullptr;  // one line per finished trial when set
};

// Trials run with seeds seed + trial on cfg.threads workers. Failures surface
// as TrialFailure for the lowest failing (method, trial) pair.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace ssdrl::harness
