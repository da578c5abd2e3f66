#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "ssdrl/measures.hpp"

namespace ssdrl::policies {

using measures::ParticleSet;
using Rng = std::mt19937_64;

struct ActionDistribution {
    std::vector<double> probabilities;
};

enum class PolicyKind { Greedy, EpsilonGreedy, Ssd, Cvar };

/// Behavior operator settings. `explore` adds uniform exploration on top of the
/// SSD and CVaR rules (zero by default).
struct PolicyConfig {
    PolicyKind kind = PolicyKind::Ssd;
    double epsilon = 0.1;
    double alpha = 0.25;
    double explore = 0.0;
    double value_tie_tolerance = 1e-6;
    double dominance_slack = 0.0;

    // "greedy", "egreedy", "egreedy@0.2", "ssd", "cvar@0.05", ...
    static PolicyConfig parse(const std::string& spec);
    std::string name() const;
    void validate() const;
};

// Actions whose particle mean is within `tol` of the largest mean.
std::vector<int> greedy_set(std::span<const ParticleSet> dists, double tol);

// Members of the greedy set that weakly dominate every other member.
std::vector<int> ssd_dominant_set(std::span<const ParticleSet> dists, double tol, double slack = 0.0);

// Actions attaining the largest CVaR at level alpha.
std::vector<int> cvar_argmax_set(std::span<const ParticleSet> dists, double alpha);

int ssd_select(std::span<const ParticleSet> dists, double tol, Rng& rng, double slack = 0.0);
int cvar_select(std::span<const ParticleSet> dists, double alpha, Rng& rng);
int epsilon_greedy_select(std::span<const ParticleSet> dists, double epsilon, double tol, Rng& rng);

ActionDistribution action_distribution(const PolicyConfig& cfg, std::span<const ParticleSet> dists);
int select_action(const PolicyConfig& cfg, std::span<const ParticleSet> dists, Rng& rng);

}  // namespace ssdrl::policies
