#include <algorithm>
#include <cmath>
#include <string>

#include "ssdrl/errors.hpp"
#include "ssdrl/learners.hpp"

namespace ssdrl::learners {

ParticleSet InitSpec::sample(std::size_t n, Rng& rng) const {
    validate();
    if (n == 0) {
        throw DomainError("particle count must be positive");
    }
    std::vector<double> v(n);
    switch (kind) {
        case Kind::Constant:
            std::fill(v.begin(), v.end(), a);
            break;
        case Kind::Normal: {
            std::normal_distribution<double> d(a, b);
            for (auto& x : v) {
                x = d(rng);
            }
            break;
        }
        case Kind::Uniform: {
            std::uniform_real_distribution<double> d(a, b);
            for (auto& x : v) {
                x = d(rng);
            }
            break;
        }
    }
    return ParticleSet(std::move(v));
}

void InitSpec::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("particle initialization parameters must be finite");
    }
    if (kind == Kind::Normal && !(b > 0.0)) {
        throw ConfigError("normal initialization needs a positive stddev");
    }
    if (kind == Kind::Uniform && !(b > a)) {
        throw ConfigError("uniform initialization needs lo < hi");
    }
}

TabularReturnModel::TabularReturnModel(int num_states, int num_actions, std::size_t particles, const InitSpec& init,
                                       Rng& rng)
    : states_(num_states), actions_(num_actions), particles_(particles) {
    if (num_states <= 0 || num_actions <= 0) {
        throw DomainError("model needs at least one state and one action");
    }
    table_.reserve(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions));
    for (int i = 0; i < num_states * num_actions; ++i) {
        table_.push_back(init.sample(particles, rng));
    }
}

std::size_t TabularReturnModel::slot(int s, int a) const {
    if (s < 0 || s >= states_ || a < 0 || a >= actions_) {
        throw DomainError("state-action pair out of range");
    }
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) + static_cast<std::size_t>(a);
}

void TabularReturnModel::set(int s, int a, ParticleSet z) {
    if (z.size() != particles_) {
        throw SizeMismatchError(z.size(), particles_);
    }
    table_[slot(s, a)] = std::move(z);
}

std::span<const ParticleSet> TabularReturnModel::actions(int s) const {
    return {table_.data() + slot(s, 0), static_cast<std::size_t>(actions_)};
}

int TabularReturnModel::greedy_action(int s) const {
    const auto row = actions(s);
    int best = 0;
    double best_mean = measures::mean(row[0]);
    for (int a = 1; a < actions_; ++a) {
        const double m = measures::mean(row[static_cast<std::size_t>(a)]);
        if (m > best_mean) {
            best = a;
            best_mean = m;
        }
    }
    return best;
}

ParticleSet resample_by_rank(const ParticleSet& values, std::size_t n) {
    if (n == 0) {
        throw DomainError("particle count must be positive");
    }
    const std::size_t m = values.size();
    if (m == n) {
        return values;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>((static_cast<double>(i) + 0.5) * static_cast<double>(m) /
                                                  static_cast<double>(n));
        out[i] = values[std::min(idx, m - 1)];
    }
    return ParticleSet(std::move(out));
}

ParticleSet quantile_regression_update(const ParticleSet& z, const ParticleSet& targets, double step_size) {
    if (z.size() != targets.size()) {
        throw SizeMismatchError(z.size(), targets.size());
    }
    const std::size_t n = z.size();
    const auto mass = static_cast<double>(n);
    std::vector<double> out(z.begin(), z.end());
    // targets are sorted, so the count of targets below z_i is a binary search
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * mass);
        const auto below = static_cast<double>(std::lower_bound(targets.begin(), targets.end(), z[i]) - targets.begin());
        out[i] += step_size * (tau - below / mass);
    }
    return ParticleSet(std::move(out));
}

ParticleSet qr_fit(const ParticleSet& init, const ParticleSet& targets, double step_size, std::size_t sweeps) {
    ParticleSet z = init;
    for (std::size_t k = 0; k < sweeps; ++k) {
        z = quantile_regression_update(z, targets, step_size);
    }
    return z;
}

}  // namespace ssdrl::learners
