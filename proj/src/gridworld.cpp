#include "ssdrl/envs.hpp"

#include <algorithm>
#include <cmath>

#include "ssdrl/errors.hpp"

namespace ssdrl::envs {

RewardSpec RewardSpec::deterministic(double value) {
    return RewardSpec{Kind::Deterministic, value, 0.0, value, value};
}

RewardSpec RewardSpec::gaussian(double mean, double stddev, double clip_low, double clip_high) {
    RewardSpec r{Kind::Gaussian, mean, stddev, clip_low, clip_high};
    r.validate();
    return r;
}

double RewardSpec::sample(Rng& rng) const {
    if (kind == Kind::Deterministic || stddev == 0.0) {
        return mean;
    }
    std::normal_distribution<double> normal(mean, stddev);
    return std::clamp(normal(rng), clip_low, clip_high);
}

void RewardSpec::validate() const {
    if (!std::isfinite(mean)) {
        throw ConfigError("reward mean must be finite");
    }
    if (kind == Kind::Gaussian) {
        if (!(stddev >= 0.0)) {
            throw ConfigError("reward stddev must be non-negative");
        }
        if (!(clip_low <= clip_high)) {
            throw ConfigError("reward clip interval is empty");
        }
    }
}

void GridSpec::validate() const {
    if (rows < 1 || cols < 1) {
        throw ConfigError("grid must have at least one row and column");
    }
    auto inside = [&](Cell c) { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; };
    if (!inside(start) || !inside(goal)) {
        throw ConfigError("start and goal must lie on the grid");
    }
    if (start == goal) {
        throw ConfigError("start and goal must differ");
    }
    for (const auto& c : cliff_cells) {
        if (!inside(c)) {
            throw ConfigError("cliff cell off the grid");
        }
    }
    if (cliff_cells.contains(start) || cliff_cells.contains(goal)) {
        throw ConfigError("start and goal cannot be cliff cells");
    }
    if (!(slip_probability >= 0.0 && slip_probability <= 1.0)) {
        throw ConfigError("slip probability must lie in [0, 1]");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in [0, 1]");
    }
    if (horizon < 1) {
        throw ConfigError("horizon must be at least 1");
    }
    if (rewards.size() != static_cast<std::size_t>(rows * cols)) {
        throw ConfigError("reward field must cover every cell");
    }
    for (const auto& r : rewards) {
        r.validate();
    }
}

GridWorld::GridWorld(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    cliff_adjacent_.assign(static_cast<std::size_t>(spec_.rows * spec_.cols), false);
    for (int s = 0; s < spec_.rows * spec_.cols; ++s) {
        const Cell c = cell(s);
        if (is_cliff(c)) {
            continue;
        }
        for (int a = 0; a < kNumActions; ++a) {
            const Cell n = move(c, a);
            if (n != c && is_cliff(n)) {
                cliff_adjacent_[static_cast<std::size_t>(s)] = true;
            }
        }
    }
}

bool GridWorld::is_cliff_adjacent(int state) const {
    if (state < 0 || state >= spec_.rows * spec_.cols) {
        return false;
    }
    return cliff_adjacent_[static_cast<std::size_t>(state)];
}

bool GridWorld::in_top_half(int state) const {
    if (state == absorbing_state()) {
        return in_top_half(index(spec_.goal));
    }
    return 2 * cell(state).row < spec_.rows;
}

Cell GridWorld::move(Cell from, int action) const noexcept {
    Cell to = from;
    switch (action) {
        case Up: to.row -= 1; break;
        case Right: to.col += 1; break;
        case Down: to.row += 1; break;
        case Left: to.col -= 1; break;
        default: break;
    }
    to.row = std::clamp(to.row, 0, spec_.rows - 1);
    to.col = std::clamp(to.col, 0, spec_.cols - 1);
    return to;
}

TransitionSample GridWorld::step(int state, int action, Rng& rng) const {
    TransitionSample t{state, action, 0.0, state, false, false};
    if (state == absorbing_state()) {
        t.next_state = absorbing_state();
        t.terminal = true;
        return t;
    }
    if (is_cliff_adjacent(state) && spec_.slip_probability > 0.0) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < spec_.slip_probability) {
            t.reward = spec_.cliff_penalty;
            t.next_state = start_state();
            t.cliff_fall = true;
            return t;
        }
    }
    const Cell to = move(cell(state), action);
    if (is_cliff(to)) {
        t.reward = spec_.cliff_penalty;
        t.next_state = start_state();
        t.cliff_fall = true;
        return t;
    }
    t.reward = spec_.reward_at(to).sample(rng);
    if (to == spec_.goal) {
        t.next_state = absorbing_state();
        t.terminal = true;
    } else {
        t.next_state = index(to);
    }
    return t;
}

bool is_top_path(const GridWorld& env, const std::vector<int>& visited_states) {
    std::size_t top = 0;
    std::size_t counted = 0;
    for (int s : visited_states) {
        if (s == env.start_state()) {
            continue;
        }
        ++counted;
        if (env.in_top_half(s)) {
            ++top;
        }
    }
    return counted > 0 && 2 * top > counted;
}

}  // namespace ssdrl::envs
