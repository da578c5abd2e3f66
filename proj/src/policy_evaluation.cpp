#include "ssdrl/errors.hpp"
#include "ssdrl/learners.hpp"

namespace ssdrl::learners {

EvaluationTrace wgf_policy_evaluation(const ParticleSet& targets, const EvaluationConfig& cfg, Rng& rng) {
    return wgf_fit(cfg.init.sample(cfg.particles, rng), targets, cfg);
}

EvaluationTrace wgf_fit(const ParticleSet& init, const ParticleSet& targets, const EvaluationConfig& cfg) {
    cfg.proximal.validate();
    if (cfg.gradient_steps == 0) {
        throw ConfigError("gradient step count must be positive");
    }
    const wgf::BellmanTarget target(resample_by_rank(targets, init.size()));
    const double target_mean = measures::mean(targets);
    const auto& ladder = cfg.proximal.temperatures;
    const std::size_t steps = cfg.gradient_steps;

    auto value_error = [&](const ParticleSet& z) {
        const double d = measures::mean(z) - target_mean;
        return d * d;
    };

    EvaluationTrace out{init, {}, {value_error(init)}, {measures::mean(init)}, target_mean};
    out.losses.reserve(steps + 1);
    out.value_errors.reserve(steps + 1);
    out.means.reserve(steps + 1);

    wgf::ProximalConfig one = cfg.proximal;
    one.max_gradient_steps = 1;
    for (std::size_t k = 0; k < steps; ++k) {
        one.temperatures.assign(1, ladder[k * ladder.size() / steps]);
        wgf::ProximalTrace trace;
        out.fitted = wgf::proximal_step(out.fitted, target, one, &trace);
        if (k == 0) {
            out.losses.push_back(trace.losses.front());
        }
        out.losses.push_back(trace.losses.back());
        out.value_errors.push_back(value_error(out.fitted));
        out.means.push_back(measures::mean(out.fitted));
    }
    return out;
}

}  // namespace ssdrl::learners
