#include "ssdrl/proximal.hpp"

#include <cmath>

#include "ssdrl/errors.hpp"

namespace ssdrl::wgf {

namespace {

constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxConsecutiveFailures = 5;

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) {
        throw SizeMismatchError(a, b);
    }
}

std::vector<double> potential_gradient(const ParticleSet& z, const BellmanTarget& targets, double h) {
    const double scale = 2.0 * h / static_cast<double>(z.size());
    std::vector<double> grad(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        grad[i] = scale * (z[i] - targets[i]);
    }
    return grad;
}

std::vector<double> loss_gradient(const transport::TransportResult& sol, const ParticleSet& z,
                                  const ParticleSet& z_prev, const BellmanTarget& targets, double h) {
    auto grad = transport::sinkhorn_gradient_source(sol, z, z_prev);
    const auto pot = potential_gradient(z, targets, h);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] += pot[i];
    }
    return grad;
}

}  // namespace

transport::AnnealingSchedule ProximalConfig::epsilon_schedule(double epsilon) const {
    auto s = transport::AnnealingSchedule::geometric(epsilon, sinkhorn_start, sinkhorn_ratio, sinkhorn_inner_iterations);
    s.max_final_iterations = sinkhorn_max_iterations;
    s.tolerance = sinkhorn_tolerance;
    s.newton_after = sinkhorn_newton_after;
    return s;
}

void ProximalConfig::validate() const {
    if (!(h > 0.0)) {
        throw DomainError("proximal time step h must be positive");
    }
    if (!(gradient_step_size > 0.0)) {
        throw DomainError("gradient step size must be positive");
    }
    if (max_gradient_steps < 1) {
        throw DomainError("max_gradient_steps must be at least 1");
    }
    if (!(loss_tolerance >= 0.0)) {
        throw DomainError("loss tolerance must be non-negative");
    }
    if (temperatures.empty()) {
        throw DomainError("temperature ladder is empty");
    }
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
        if (!(temperatures[k] > 0.0) || (k > 0 && temperatures[k] > temperatures[k - 1])) {
            throw DomainError("temperature ladder must be positive and non-increasing");
        }
    }
}

std::vector<double> ProximalConfig::temperature_ladder(double min_temperature, double start, double step) {
    if (!(min_temperature > 0.0) || !(step > 0.0)) {
        throw DomainError("temperature ladder needs positive minimum and step");
    }
    std::vector<double> out;
    for (double t = start; t > min_temperature; t -= step) {
        out.push_back(t);
    }
    out.push_back(min_temperature);
    return out;
}

BellmanTarget bellman_targets(double reward, double gamma, const ParticleSet& next_particles) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw DomainError("gamma must lie in [0, 1]");
    }
    std::vector<double> out(next_particles.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = reward + gamma * next_particles[i];
    }
    return BellmanTarget(ParticleSet(std::move(out)));
}

double potential_energy(const BellmanTarget& targets, const ParticleSet& z) {
    require_same_size(targets.size(), z.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = targets[i] - z[i];
        acc += d * d;
    }
    return acc / (2.0 * static_cast<double>(z.size()));
}

double proximal_loss(const ParticleSet& z, const ParticleSet& z_prev, const BellmanTarget& targets,
                     const ProximalConfig& cfg, double epsilon) {
    require_same_size(z.size(), z_prev.size());
    require_same_size(z.size(), targets.size());
    const auto sol = transport::sinkhorn_log(z, z_prev, cfg.epsilon_schedule(epsilon));
    return sol.distance + 2.0 * cfg.h * potential_energy(targets, z);
}

double proximal_loss(const ParticleSet& z, const ParticleSet& z_prev, const BellmanTarget& targets,
                     const ProximalConfig& cfg) {
    return proximal_loss(z, z_prev, targets, cfg, cfg.final_temperature());
}

std::vector<double> proximal_loss_gradient(const ParticleSet& z, const ParticleSet& z_prev,
                                           const BellmanTarget& targets, const ProximalConfig& cfg, double epsilon) {
    require_same_size(z.size(), z_prev.size());
    require_same_size(z.size(), targets.size());
    const auto sol = transport::sinkhorn_log(z, z_prev, cfg.epsilon_schedule(epsilon));
    return loss_gradient(sol, z, z_prev, targets, cfg.h);
}

std::vector<double> proximal_loss_gradient(const ParticleSet& z, const ParticleSet& z_prev,
                                           const BellmanTarget& targets, const ProximalConfig& cfg) {
    return proximal_loss_gradient(z, z_prev, targets, cfg, cfg.final_temperature());
}

ParticleSet proximal_step(const ParticleSet& z_prev, const BellmanTarget& targets, const ProximalConfig& cfg,
                          ProximalTrace* trace) {
    cfg.validate();
    require_same_size(z_prev.size(), targets.size());

    const std::size_t n = z_prev.size();
    const auto mass = static_cast<double>(n);
    const std::size_t phases = cfg.temperatures.size();
    const std::size_t budget = cfg.max_gradient_steps;

    ParticleSet z = z_prev;
    double step = cfg.gradient_step_size;
    std::size_t failures = 0;
    std::size_t attempts = 0;
    transport::TransportResult sol;

    auto record = [&](double loss, double eps) {
        if (trace != nullptr) {
            trace->losses.push_back(loss);
            trace->temperatures.push_back(eps);
        }
    };

    for (std::size_t k = 0; k < phases; ++k) {
        const std::size_t phase_budget = (k + 1) * budget / phases - k * budget / phases;
        if (phase_budget == 0) {
            continue;
        }
        const double eps = cfg.temperatures[k];
        const auto schedule = cfg.epsilon_schedule(eps);
        sol = transport::sinkhorn_log(z, z_prev, schedule, sol);
        double loss = sol.distance + 2.0 * cfg.h * potential_energy(targets, z);
        record(loss, eps);

        std::size_t taken = 0;
        while (taken < phase_budget) {
            const auto grad = loss_gradient(sol, z, z_prev, targets, cfg.h);
            double grad_sq = 0.0;
            for (double g : grad) {
                grad_sq += g * g;
            }
            const double predicted = step * mass * grad_sq;
            if (predicted < cfg.loss_tolerance) {
                break;
            }

            std::vector<double> moved(z.begin(), z.end());
            for (std::size_t i = 0; i < n; ++i) {
                moved[i] -= step * mass * grad[i];
            }
            ParticleSet candidate(std::move(moved));
            auto cand_sol = transport::sinkhorn_log(candidate, z_prev, schedule, sol);
            const double cand_loss = cand_sol.distance + 2.0 * cfg.h * potential_energy(targets, candidate);
            ++attempts;

            if (cand_loss <= loss - kArmijo * predicted) {
                const double decrease = loss - cand_loss;
                z = std::move(candidate);
                sol = std::move(cand_sol);
                loss = cand_loss;
                record(loss, eps);
                ++taken;
                failures = 0;
                if (trace != nullptr) {
                    ++trace->accepted_steps;
                }
                if (decrease < cfg.loss_tolerance) {
                    break;
                }
            } else {
                step *= 0.5;
                if (trace != nullptr) {
                    ++trace->rejected_steps;
                }
                if (++failures >= kMaxConsecutiveFailures) {
                    throw DivergenceError("proximal loss failed to decrease on consecutive steps", attempts);
                }
            }
        }
    }
    if (trace != nullptr) {
        trace->final_step_size = step;
    }
    return z;
}

}  // namespace ssdrl::wgf
