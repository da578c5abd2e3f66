#pragma once

#include <cstddef>
#include <vector>

#include "ssdrl/measures.hpp"
#include "ssdrl/transport.hpp"

namespace ssdrl::wgf {

using measures::ParticleSet;

/// Settings of one JKO proximal update.
///
/// `temperatures` is the entropic temperature ladder walked across the
/// gradient steps of a single proximal update; its last entry is the final
/// temperature (the inverse of beta). Each Sinkhorn solve anneals
/// geometrically from `sinkhorn_start` down to the temperature in use.
struct ProximalConfig {
    double h = 1.0;
    std::vector<double> temperatures{1.0, 0.5, 0.25};
    double gradient_step_size = 0.5;
    std::size_t max_gradient_steps = 100;
    double loss_tolerance = 1e-8;

    double sinkhorn_start = 1.0;
    double sinkhorn_ratio = 0.5;
    std::size_t sinkhorn_inner_iterations = 20;
    std::size_t sinkhorn_max_iterations = 20000;
    double sinkhorn_tolerance = 1e-9;
    std::size_t sinkhorn_newton_after = 50;

    double final_temperature() const { return temperatures.back(); }
    transport::AnnealingSchedule epsilon_schedule(double epsilon) const;
    transport::AnnealingSchedule epsilon_schedule() const { return epsilon_schedule(final_temperature()); }
    void validate() const;

    // 1.0, 0.5, ... in additive steps of `step` while above `min_temperature`, then `min_temperature`.
    static std::vector<double> temperature_ladder(double min_temperature, double start = 1.0, double step = 0.5);
};

/// Realizations r + gamma * z^[i](s', a*) of the distributional Bellman target, sorted.
class BellmanTarget {
public:
    explicit BellmanTarget(ParticleSet values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const ParticleSet& particles() const noexcept { return values_; }

private:
    ParticleSet values_;
};

BellmanTarget bellman_targets(double reward, double gamma, const ParticleSet& next_particles);

// (1/2N) sum_i (T z^[i] - z^[i])^2, pairing order statistics by rank.
double potential_energy(const BellmanTarget& targets, const ParticleSet& z);

// W_eps(z, z_prev) + 2h * potential_energy(targets, z).
double proximal_loss(const ParticleSet& z, const ParticleSet& z_prev, const BellmanTarget& targets,
                     const ProximalConfig& cfg, double epsilon);
double proximal_loss(const ParticleSet& z, const ParticleSet& z_prev, const BellmanTarget& targets,
                     const ProximalConfig& cfg);

// Euclidean gradient of proximal_loss in the particle coordinates: the transport
// term through the envelope gradient, the potential term analytically.
std::vector<double> proximal_loss_gradient(const ParticleSet& z, const ParticleSet& z_prev,
                                           const BellmanTarget& targets, const ProximalConfig& cfg, double epsilon);
std::vector<double> proximal_loss_gradient(const ParticleSet& z, const ParticleSet& z_prev,
                                           const BellmanTarget& targets, const ProximalConfig& cfg);

struct ProximalTrace {
    std::vector<double> losses;        // loss after every accepted step (the first entry is the start point)
    std::vector<double> temperatures;  // temperature each loss was evaluated at
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double final_step_size = 0.0;
};

/// Approximately solves argmin_z W_eps(z, z_prev) + 2h F(z) by descent from z_prev.
///
/// Particles move along the per-particle gradient N * dL/dz_i (the Lagrangian
/// velocity of the flow), scaled by a step size that starts at
/// `gradient_step_size` and is halved whenever a candidate fails to decrease
/// the loss. Throws DivergenceError after five consecutive failed candidates.
ParticleSet proximal_step(const ParticleSet& z_prev, const BellmanTarget& targets, const ProximalConfig& cfg,
                          ProximalTrace* trace = nullptr);

}  // namespace ssdrl::wgf
