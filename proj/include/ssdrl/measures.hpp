#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ssdrl::measures {

/// N equally weighted diracs representing one return distribution.
///
/// Values are kept sorted (order statistics) and finite; the size is fixed at
/// construction. Instances are immutable, so they can be shared across threads.
class ParticleSet {
public:
    explicit ParticleSet(std::vector<double> values);
    ParticleSet(std::initializer_list<double> values);

    static ParticleSet constant(std::size_t n, double value);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    double min() const noexcept { return values_.front(); }
    double max() const noexcept { return values_.back(); }

    ParticleSet shifted(double offset) const;

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    friend bool operator==(const ParticleSet&, const ParticleSet&) = default;

private:
    std::vector<double> values_;
};

enum class DominanceVerdict { FirstDominates, SecondDominates, Mutual, Incomparable };

double mean(const ParticleSet& p);
double second_moment(const ParticleSet& p);
double variance(const ParticleSet& p);

// Cumulative sums of the sorted values; element j-1 holds z[1] + ... + z[j].
std::vector<double> prefix_sums(const ParticleSet& p);

// Weak second-order dominance: every prefix sum of `a` is at least the
// corresponding prefix sum of `b` (minus `slack`). A set dominates itself.
bool ssd_dominates(const ParticleSet& a, const ParticleSet& b, double slack = 0.0);
DominanceVerdict compare(const ParticleSet& a, const ParticleSet& b, double slack = 0.0);

// Empirical F2(alpha) = integral of the CDF up to alpha.
double cumulative_cdf_f2(const ParticleSet& p, double alpha);

// Cumulative quantile function F^{-2}(tau), tau in (0,1]; exact on the grid j/N,
// piecewise linear in between.
double cumulative_quantile_f_neg2(const ParticleSet& p, double tau);

// Conditional value at risk at level tau: F^{-2}(tau) / tau.
double cvar(const ParticleSet& p, double tau);

}  // namespace ssdrl::measures
