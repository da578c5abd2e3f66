#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ssdrl/envs.hpp"
#include "ssdrl/measures.hpp"
#include "ssdrl/policies.hpp"
#include "ssdrl/proximal.hpp"

namespace ssdrl::learners {

using envs::GridWorld;
using envs::Rng;
using measures::ParticleSet;

/// Distribution the initial particles are drawn from.
struct InitSpec {
    enum class Kind { Constant, Normal, Uniform };
    Kind kind = Kind::Normal;
    double a = 0.0;  // constant value, normal mean, or uniform lower bound
    double b = 1.0;  // normal stddev or uniform upper bound

    static InitSpec constant(double v) { return {Kind::Constant, v, 0.0}; }
    static InitSpec normal(double mean, double stddev) { return {Kind::Normal, mean, stddev}; }
    static InitSpec uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    ParticleSet sample(std::size_t n, Rng& rng) const;
    void validate() const;
};

/// Particle table z(s, a), every entry holding the same number of particles.
class TabularReturnModel {
public:
    TabularReturnModel(int num_states, int num_actions, std::size_t particles, const InitSpec& init, Rng& rng);

    int num_states() const noexcept { return states_; }
    int num_actions() const noexcept { return actions_; }
    std::size_t particle_count() const noexcept { return particles_; }

    const ParticleSet& at(int s, int a) const { return table_[slot(s, a)]; }
    void set(int s, int a, ParticleSet z);
    std::span<const ParticleSet> actions(int s) const;
    // Lowest-index action with the largest particle mean.
    int greedy_action(int s) const;

private:
    std::size_t slot(int s, int a) const;

    int states_;
    int actions_;
    std::size_t particles_;
    std::vector<ParticleSet> table_;
};

enum class UpdateRule { Wgf, QuantileRegression };

struct LearnerConfig {
    std::size_t episodes = 200;
    std::size_t horizon = 500;
    std::size_t particles = 16;
    InitSpec init = InitSpec::constant(0.0);
    wgf::ProximalConfig proximal = default_control_proximal();
    policies::PolicyConfig policy;
    double qr_step_size = 0.05;
    std::uint64_t seed = 0;
    // After every episode, roll out the greedy target policy once (no learning).
    bool evaluate_greedy = true;

    static wgf::ProximalConfig default_control_proximal();
    void validate() const;
};

struct EpisodeRecord {
    std::size_t episode = 0;
    double episode_return = 0.0;
    std::size_t steps = 0;
    std::size_t cliff_falls = 0;
    std::size_t multi_solution_events = 0;
    bool top_path = false;
    bool reached_goal = false;
    double greedy_return = 0.0;  // target-policy rollout after the episode
    std::size_t greedy_steps = 0;
};

struct ControlResult {
    TabularReturnModel model;
    std::vector<EpisodeRecord> episodes;
};

// Tabular quantile-regression step of z towards the target sample.
ParticleSet quantile_regression_update(const ParticleSet& z, const ParticleSet& targets, double step_size);

ControlResult wgf_fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg);
ControlResult qr_fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg);
ControlResult fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg, UpdateRule rule);

struct QLearningConfig {
    std::size_t episodes = 10000;
    double epsilon = 0.1;
    double gamma = 0.9;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

struct QLearningResult {
    std::vector<double> q;       // num_states * num_actions, row-major by state
    std::vector<int> policy;     // greedy action per state, lowest index on ties
};

QLearningResult q_learning(const GridWorld& env, const QLearningConfig& cfg);

/// Discounted returns of `rollouts` trajectories truncated at `depth` steps.
/// A negative `first_action` follows the policy from the first step.
ParticleSet monte_carlo_targets(const GridWorld& env, const std::vector<int>& policy, int state, std::size_t rollouts,
                                std::size_t depth, double gamma, Rng& rng, int first_action = -1);

// Picks n order statistics at evenly spaced ranks (thinning or repeating).
ParticleSet resample_by_rank(const ParticleSet& values, std::size_t n);

struct EvaluationConfig {
    wgf::ProximalConfig proximal;
    std::size_t particles = 200;
    std::size_t gradient_steps = 100;
    InitSpec init = InitSpec::normal(0.0, 1.0);
};

struct EvaluationTrace {
    ParticleSet fitted;
    std::vector<double> losses;        // gradient_steps + 1 entries
    std::vector<double> value_errors;  // squared mean error, gradient_steps + 1 entries
    std::vector<double> means;         // particle mean, gradient_steps + 1 entries
    double target_mean = 0.0;
};

/// Transports freshly initialized particles towards a fixed target sample by a
/// sequence of one-gradient-step JKO updates, each anchored at the previous
/// iterate. The temperature follows the configured ladder, one rung per equal
/// share of the steps.
EvaluationTrace wgf_policy_evaluation(const ParticleSet& targets, const EvaluationConfig& cfg, Rng& rng);

// Same flow started from given particles.
EvaluationTrace wgf_fit(const ParticleSet& init, const ParticleSet& targets, const EvaluationConfig& cfg);

// Repeated quantile-regression sweeps against a fixed target sample.
ParticleSet qr_fit(const ParticleSet& init, const ParticleSet& targets, double step_size, std::size_t sweeps);

}  // namespace ssdrl::learners
