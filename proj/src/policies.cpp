#include "ssdrl/policies.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "ssdrl/errors.hpp"

namespace ssdrl::policies {

namespace {

int uniform_pick(const std::vector<int>& actions, Rng& rng) {
    if (actions.size() == 1) {
        return actions.front();
    }
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    return actions[pick(rng)];
}

int uniform_action(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
    return pick(rng);
}

bool coin(double p, Rng& rng) {
    if (p <= 0.0) {
        return false;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return unit(rng) < p;
}

void require_actions(std::span<const ParticleSet> dists) {
    if (dists.empty()) {
        throw DomainError("at least one feasible action is required");
    }
}

double parse_number(const std::string& text, const std::string& spec) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw ConfigError("bad policy parameter in '" + spec + "'");
    }
    return v;
}

}  // namespace

PolicyConfig PolicyConfig::parse(const std::string& spec) {
    const auto at = spec.find('@');
    const std::string kind = spec.substr(0, at);
    const bool has_param = at != std::string::npos;
    PolicyConfig cfg;
    if (kind == "greedy") {
        cfg.kind = PolicyKind::Greedy;
    } else if (kind == "egreedy") {
        cfg.kind = PolicyKind::EpsilonGreedy;
        if (has_param) {
            cfg.epsilon = parse_number(spec.substr(at + 1), spec);
        }
    } else if (kind == "ssd") {
        cfg.kind = PolicyKind::Ssd;
    } else if (kind == "cvar") {
        cfg.kind = PolicyKind::Cvar;
        if (has_param) {
            cfg.alpha = parse_number(spec.substr(at + 1), spec);
        }
    } else {
        throw ConfigError("unknown policy '" + spec + "'");
    }
    cfg.validate();
    return cfg;
}

std::string PolicyConfig::name() const {
    auto fmt = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
        }
        return s;
    };
    switch (kind) {
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::EpsilonGreedy: return "egreedy";
        case PolicyKind::Ssd: return "ssd";
        case PolicyKind::Cvar: return "cvar@" + fmt(alpha);
    }
    return "unknown";
}

void PolicyConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(epsilon) || !unit(explore)) {
        throw ConfigError("exploration rates must lie in [0, 1]");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("CVaR level must lie in (0, 1]");
    }
    if (!(value_tie_tolerance >= 0.0) || !(dominance_slack >= 0.0)) {
        throw ConfigError("tolerances must be non-negative");
    }
}

std::vector<int> greedy_set(std::span<const ParticleSet> dists, double tol) {
    require_actions(dists);
    std::vector<double> means(dists.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < dists.size(); ++a) {
        means[a] = measures::mean(dists[a]);
        best = std::max(best, means[a]);
    }
    std::vector<int> out;
    for (std::size_t a = 0; a < dists.size(); ++a) {
        if (means[a] >= best - tol) {
            out.push_back(static_cast<int>(a));
        }
    }
    return out;
}

std::vector<int> ssd_dominant_set(std::span<const ParticleSet> dists, double tol, double slack) {
    const auto competitors = greedy_set(dists, tol);
    std::vector<int> out;
    for (int a : competitors) {
        const bool dominates_all = std::all_of(competitors.begin(), competitors.end(), [&](int b) {
            return a == b || measures::ssd_dominates(dists[a], dists[b], slack);
        });
        if (dominates_all) {
            out.push_back(a);
        }
    }
    return out;
}

std::vector<int> cvar_argmax_set(std::span<const ParticleSet> dists, double alpha) {
    require_actions(dists);
    std::vector<double> values(dists.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < dists.size(); ++a) {
        values[a] = measures::cvar(dists[a], alpha);
        best = std::max(best, values[a]);
    }
    std::vector<int> out;
    for (std::size_t a = 0; a < dists.size(); ++a) {
        if (values[a] == best) {
            out.push_back(static_cast<int>(a));
        }
    }
    return out;
}

int ssd_select(std::span<const ParticleSet> dists, double tol, Rng& rng, double slack) {
    const auto dominant = ssd_dominant_set(dists, tol, slack);
    if (!dominant.empty()) {
        return uniform_pick(dominant, rng);
    }
    return uniform_pick(greedy_set(dists, tol), rng);
}

int cvar_select(std::span<const ParticleSet> dists, double alpha, Rng& rng) {
    return uniform_pick(cvar_argmax_set(dists, alpha), rng);
}

int epsilon_greedy_select(std::span<const ParticleSet> dists, double epsilon, double tol, Rng& rng) {
    require_actions(dists);
    if (coin(epsilon, rng)) {
        return uniform_action(dists.size(), rng);
    }
    return uniform_pick(greedy_set(dists, tol), rng);
}

ActionDistribution action_distribution(const PolicyConfig& cfg, std::span<const ParticleSet> dists) {
    require_actions(dists);
    const std::size_t n = dists.size();
    std::vector<int> chosen;
    double explore = cfg.explore;
    switch (cfg.kind) {
        case PolicyKind::Greedy:
            chosen = greedy_set(dists, cfg.value_tie_tolerance);
            explore = 0.0;
            break;
        case PolicyKind::EpsilonGreedy:
            chosen = greedy_set(dists, cfg.value_tie_tolerance);
            explore = cfg.epsilon;
            break;
        case PolicyKind::Ssd:
            chosen = ssd_dominant_set(dists, cfg.value_tie_tolerance, cfg.dominance_slack);
            if (chosen.empty()) {
                chosen = greedy_set(dists, cfg.value_tie_tolerance);
            }
            break;
        case PolicyKind::Cvar:
            chosen = cvar_argmax_set(dists, cfg.alpha);
            break;
    }
    ActionDistribution out{std::vector<double>(n, explore / static_cast<double>(n))};
    const double share = (1.0 - explore) / static_cast<double>(chosen.size());
    for (int a : chosen) {
        out.probabilities[static_cast<std::size_t>(a)] += share;
    }
    return out;
}

int select_action(const PolicyConfig& cfg, std::span<const ParticleSet> dists, Rng& rng) {
    switch (cfg.kind) {
        case PolicyKind::Greedy:
            return uniform_pick(greedy_set(dists, cfg.value_tie_tolerance), rng);
        case PolicyKind::EpsilonGreedy:
            return epsilon_greedy_select(dists, cfg.epsilon, cfg.value_tie_tolerance, rng);
        case PolicyKind::Ssd:
            if (coin(cfg.explore, rng)) {
                return uniform_action(dists.size(), rng);
            }
            return ssd_select(dists, cfg.value_tie_tolerance, rng, cfg.dominance_slack);
        case PolicyKind::Cvar:
            if (coin(cfg.explore, rng)) {
                return uniform_action(dists.size(), rng);
            }
            return cvar_select(dists, cfg.alpha, rng);
    }
    throw ConfigError("unknown policy kind");
}

}  // namespace ssdrl::policies
