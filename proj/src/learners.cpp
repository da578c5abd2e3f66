#include <algorithm>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "ssdrl/errors.hpp"
#include "ssdrl/learners.hpp"

namespace ssdrl::learners {

wgf::ProximalConfig LearnerConfig::default_control_proximal() {
    wgf::ProximalConfig p;
    p.max_gradient_steps = 50;
    return p;
}

void LearnerConfig::validate() const {
    if (episodes == 0 || horizon == 0 || particles == 0) {
        throw ConfigError("episodes, horizon and particle count must be positive");
    }
    if (!(qr_step_size > 0.0)) {
        throw ConfigError("quantile-regression step size must be positive");
    }
    init.validate();
    proximal.validate();
    policy.validate();
}

ControlResult wgf_fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg) {
    return fitted_q_iteration(env, cfg, UpdateRule::Wgf);
}

ControlResult qr_fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg) {
    return fitted_q_iteration(env, cfg, UpdateRule::QuantileRegression);
}

namespace {

// Undiscounted return and length of one episode under the greedy target policy.
std::pair<double, std::size_t> greedy_rollout(const GridWorld& env, const TabularReturnModel& model,
                                              std::size_t horizon, Rng& rng) {
    int s = env.start_state();
    double total = 0.0;
    std::size_t t = 0;
    while (t < horizon) {
        const auto tr = env.step(s, model.greedy_action(s), rng);
        total += tr.reward;
        ++t;
        if (tr.terminal) {
            break;
        }
        s = tr.next_state;
    }
    return {total, t};
}

}  // namespace

ControlResult fitted_q_iteration(const GridWorld& env, const LearnerConfig& cfg, UpdateRule rule) {
    cfg.validate();
    Rng rng(cfg.seed);
    // separate stream so that evaluation never perturbs learning
    Rng eval_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    ControlResult result{TabularReturnModel(env.num_states(), env.num_actions(), cfg.particles, cfg.init, rng), {}};
    auto& model = result.model;
    // the absorbing state carries no further return
    for (int a = 0; a < env.num_actions(); ++a) {
        model.set(env.absorbing_state(), a, ParticleSet::constant(cfg.particles, 0.0));
    }
    const double gamma = env.gamma();
    const std::size_t horizon = std::min(cfg.horizon, env.horizon());
    std::vector<int> visited;

    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        EpisodeRecord rec;
        rec.episode = ep;
        int s = env.start_state();
        visited.assign(1, s);
        for (std::size_t t = 0; t < horizon; ++t) {
            const auto dists = model.actions(s);
            if (policies::greedy_set(dists, cfg.policy.value_tie_tolerance).size() >= 2) {
                ++rec.multi_solution_events;
            }
            const int a = policies::select_action(cfg.policy, dists, rng);
            const auto tr = env.step(s, a, rng);

            const int a_star = model.greedy_action(tr.next_state);
            const double g = tr.terminal ? 0.0 : gamma;
            const auto targets = wgf::bellman_targets(tr.reward, g, model.at(tr.next_state, a_star));
            try {
                if (rule == UpdateRule::Wgf) {
                    model.set(s, a, wgf::proximal_step(model.at(s, a), targets, cfg.proximal));
                } else {
                    model.set(s, a, quantile_regression_update(model.at(s, a), targets.particles(), cfg.qr_step_size));
                }
            } catch (const DivergenceError& e) {
                throw DivergenceError(e.detail() + " (episode " + std::to_string(ep) + ", step " +
                                          std::to_string(t) + ")",
                                      e.step());
            }

            rec.episode_return += tr.reward;
            ++rec.steps;
            if (tr.cliff_fall) {
                ++rec.cliff_falls;
            }
            s = tr.next_state;
            if (tr.terminal) {
                rec.reached_goal = true;
                break;
            }
            visited.push_back(s);
        }
        rec.top_path = envs::is_top_path(env, visited);
        if (cfg.evaluate_greedy) {
            std::tie(rec.greedy_return, rec.greedy_steps) = greedy_rollout(env, model, horizon, eval_rng);
        }
        result.episodes.push_back(rec);
    }
    return result;
}

namespace {

int argmax_first(const double* row, int n) {
    return static_cast<int>(std::max_element(row, row + n) - row);
}

}  // namespace

QLearningResult q_learning(const GridWorld& env, const QLearningConfig& cfg) {
    if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0 || cfg.gamma < 0.0 || cfg.gamma > 1.0 || !(cfg.learning_rate > 0.0)) {
        throw ConfigError("invalid Q-learning parameters");
    }
    const int na = env.num_actions();
    const auto ns = static_cast<std::size_t>(env.num_states());
    QLearningResult out{std::vector<double>(ns * static_cast<std::size_t>(na), 0.0), std::vector<int>(ns, 0)};
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> any_action(0, na - 1);
    std::vector<int> ties;
    auto row = [&](int s) { return out.q.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(na); };

    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        int s = env.start_state();
        for (std::size_t t = 0; t < env.horizon(); ++t) {
            int a = 0;
            if (unit(rng) < cfg.epsilon) {
                a = any_action(rng);
            } else {
                const double* q = row(s);
                const double best = *std::max_element(q, q + na);
                ties.clear();
                for (int b = 0; b < na; ++b) {
                    if (q[b] == best) {
                        ties.push_back(b);
                    }
                }
                a = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
            }
            const auto tr = env.step(s, a, rng);
            const double* next = row(tr.next_state);
            const double bootstrap = tr.terminal ? 0.0 : cfg.gamma * *std::max_element(next, next + na);
            double& q_sa = row(s)[a];
            q_sa += cfg.learning_rate * (tr.reward + bootstrap - q_sa);
            s = tr.next_state;
            if (tr.terminal) {
                break;
            }
        }
    }
    for (int s = 0; s < env.num_states(); ++s) {
        out.policy[static_cast<std::size_t>(s)] = argmax_first(row(s), na);
    }
    return out;
}

ParticleSet monte_carlo_targets(const GridWorld& env, const std::vector<int>& policy, int state, std::size_t rollouts,
                                std::size_t depth, double gamma, Rng& rng, int first_action) {
    if (rollouts == 0 || depth == 0) {
        throw DomainError("rollouts and depth must be positive");
    }
    if (policy.size() != static_cast<std::size_t>(env.num_states())) {
        throw SizeMismatchError(policy.size(), static_cast<std::size_t>(env.num_states()));
    }
    std::vector<double> returns(rollouts);
    for (auto& g : returns) {
        int s = state;
        double discount = 1.0;
        g = 0.0;
        for (std::size_t t = 0; t < depth; ++t) {
            const int a = (t == 0 && first_action >= 0) ? first_action : policy[static_cast<std::size_t>(s)];
            const auto tr = env.step(s, a, rng);
            g += discount * tr.reward;
            discount *= gamma;
            s = tr.next_state;
            if (tr.terminal) {
                break;
            }
        }
    }
    return ParticleSet(std::move(returns));
}

}  // namespace ssdrl::learners
