#include <cmath>
#include <numeric>

#include "ssdrl/envs.hpp"
#include "ssdrl/errors.hpp"

namespace ssdrl::envs {

double GmmSpec::mean() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k] * means[k];
    }
    return acc;
}

double GmmSpec::second_moment() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k] * (means[k] * means[k] + stddevs[k] * stddevs[k]);
    }
    return acc;
}

void GmmSpec::validate() const {
    if (weights.empty() || weights.size() != means.size() || weights.size() != stddevs.size()) {
        throw ConfigError("mixture weights, means and stddevs must be non-empty and equally long");
    }
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0) || !(stddevs[k] > 0.0) || !std::isfinite(means[k])) {
            throw ConfigError("mixture weights must be non-negative and stddevs positive");
        }
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("mixture weights must sum to 1");
    }
}

std::vector<double> sample_gmm(const GmmSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    std::discrete_distribution<std::size_t> component(spec.weights.begin(), spec.weights.end());
    std::vector<double> out(n);
    for (auto& v : out) {
        const std::size_t k = component(rng);
        std::normal_distribution<double> normal(spec.means[k], spec.stddevs[k]);
        v = normal(rng);
    }
    return out;
}

}  // namespace ssdrl::envs
