#include "ssdrl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssdrl/errors.hpp"

namespace ssdrl::measures {

ParticleSet::ParticleSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw DomainError("particle set must contain at least one particle");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("particle values must be finite");
        }
    }
    std::sort(values_.begin(), values_.end());
}

ParticleSet::ParticleSet(std::initializer_list<double> values) : ParticleSet(std::vector<double>(values)) {}

ParticleSet ParticleSet::constant(std::size_t n, double value) {
    return ParticleSet(std::vector<double>(n, value));
}

ParticleSet ParticleSet::shifted(double offset) const {
    std::vector<double> out(values_);
    for (double& v : out) {
        v += offset;
    }
    return ParticleSet(std::move(out));
}

double mean(const ParticleSet& p) {
    return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

double second_moment(const ParticleSet& p) {
    double acc = 0.0;
    for (double v : p) {
        acc += v * v;
    }
    return acc / static_cast<double>(p.size());
}

double variance(const ParticleSet& p) {
    const double m = mean(p);
    double acc = 0.0;
    for (double v : p) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(p.size());
}

std::vector<double> prefix_sums(const ParticleSet& p) {
    std::vector<double> out(p.size());
    std::partial_sum(p.begin(), p.end(), out.begin());
    return out;
}

bool ssd_dominates(const ParticleSet& a, const ParticleSet& b, double slack) {
    if (a.size() != b.size()) {
        throw SizeMismatchError(a.size(), b.size());
    }
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        sum_a += a[j];
        sum_b += b[j];
        if (sum_a + slack < sum_b) {
            return false;
        }
    }
    return true;
}

DominanceVerdict compare(const ParticleSet& a, const ParticleSet& b, double slack) {
    const bool ab = ssd_dominates(a, b, slack);
    const bool ba = ssd_dominates(b, a, slack);
    if (ab && ba) {
        return DominanceVerdict::Mutual;
    }
    if (ab) {
        return DominanceVerdict::FirstDominates;
    }
    if (ba) {
        return DominanceVerdict::SecondDominates;
    }
    return DominanceVerdict::Incomparable;
}

double cumulative_cdf_f2(const ParticleSet& p, double alpha) {
    double acc = 0.0;
    for (double v : p) {
        acc += std::max(alpha - v, 0.0);
    }
    return acc / static_cast<double>(p.size());
}

double cumulative_quantile_f_neg2(const ParticleSet& p, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw DomainError("tau must lie in (0, 1]");
    }
    const auto n = p.size();
    const double pos = tau * static_cast<double>(n);
    auto whole = static_cast<std::size_t>(std::floor(pos));
    if (whole >= n) {
        whole = n;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < whole; ++i) {
        acc += p[i];
    }
    if (whole < n) {
        acc += (pos - static_cast<double>(whole)) * p[whole];
    }
    return acc / static_cast<double>(n);
}

double cvar(const ParticleSet& p, double tau) {
    return cumulative_quantile_f_neg2(p, tau) / tau;
}

}  // namespace ssdrl::measures
