#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ssdrl::envs {

using Rng = std::mt19937_64;

struct Cell {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Reward drawn when the agent enters a cell.
struct RewardSpec {
    enum class Kind { Deterministic, Gaussian };

    Kind kind = Kind::Deterministic;
    double mean = 0.0;  // the value itself for deterministic rewards
    double stddev = 0.0;
    double clip_low = 0.0;
    double clip_high = 0.0;

    static RewardSpec deterministic(double value);
    static RewardSpec gaussian(double mean, double stddev, double clip_low, double clip_high);

    double sample(Rng& rng) const;
    void validate() const;
};

enum Action : int { Up = 0, Right = 1, Down = 2, Left = 3 };
inline constexpr int kNumActions = 4;

struct GridSpec {
    int rows = 4;
    int cols = 12;
    Cell start{3, 0};
    Cell goal{3, 11};
    std::set<Cell> cliff_cells;
    double slip_probability = 0.0;
    double cliff_penalty = -100.0;
    std::vector<RewardSpec> rewards;  // one per cell, row-major
    double gamma = 1.0;
    std::size_t horizon = 500;

    const RewardSpec& reward_at(Cell c) const { return rewards[static_cast<std::size_t>(c.row * cols + c.col)]; }
    void validate() const;
};

struct TransitionSample {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
    bool terminal = false;
    bool cliff_fall = false;
};

/// Cliff-walking gridworld with optional slip from cliff-adjacent cells.
///
/// States are row-major cell indices plus one absorbing state entered when the
/// goal is reached. Moves off the grid leave the agent in place. Entering a
/// cliff cell, or slipping from a cell next to one, costs `cliff_penalty` and
/// sends the agent back to the start without ending the episode.
class GridWorld {
public:
    explicit GridWorld(GridSpec spec);

    const GridSpec& spec() const noexcept { return spec_; }
    int num_states() const noexcept { return spec_.rows * spec_.cols + 1; }
    int num_actions() const noexcept { return kNumActions; }
    int start_state() const noexcept { return index(spec_.start); }
    int absorbing_state() const noexcept { return spec_.rows * spec_.cols; }
    double gamma() const noexcept { return spec_.gamma; }
    std::size_t horizon() const noexcept { return spec_.horizon; }

    int index(Cell c) const noexcept { return c.row * spec_.cols + c.col; }
    Cell cell(int state) const noexcept { return {state / spec_.cols, state % spec_.cols}; }
    bool is_cliff(Cell c) const { return spec_.cliff_cells.contains(c); }
    bool is_cliff_adjacent(int state) const;
    bool in_top_half(int state) const;

    // Cell reached by a deterministic move (clamped to the grid).
    Cell move(Cell from, int action) const noexcept;

    TransitionSample step(int state, int action, Rng& rng) const;

private:
    GridSpec spec_;
    std::vector<bool> cliff_adjacent_;
};

struct GmmSpec {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> stddevs;

    double mean() const;
    double second_moment() const;
    void validate() const;
};

std::vector<double> sample_gmm(const GmmSpec& spec, std::size_t n, Rng& rng);

// Classifies an episode by where its non-start cells lie: true when the
// majority sit in the top half of the grid.
bool is_top_path(const GridWorld& env, const std::vector<int>& visited_states);

}  // namespace ssdrl::envs
