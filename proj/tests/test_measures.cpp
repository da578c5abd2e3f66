#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ssdrl/errors.hpp"
#include "ssdrl/measures.hpp"

using namespace ssdrl;
using measures::ParticleSet;

namespace {

ParticleSet random_set(std::mt19937_64& rng, std::size_t n, double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return ParticleSet(v);
}

}  // namespace

TEST(ParticleSet, SortsOnConstruction) {
    const ParticleSet p{3.0, -1.0, 2.0};
    EXPECT_EQ(p[0], -1.0);
    EXPECT_EQ(p[1], 2.0);
    EXPECT_EQ(p[2], 3.0);
}

TEST(ParticleSet, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(ParticleSet(std::vector<double>{}), DomainError);
    EXPECT_THROW((ParticleSet{1.0, std::numeric_limits<double>::quiet_NaN()}), DomainError);
    EXPECT_THROW((ParticleSet{std::numeric_limits<double>::infinity()}), DomainError);
}

TEST(Moments, MeanAndSecondMoment) {
    const ParticleSet p{0.0, 2.0};
    EXPECT_DOUBLE_EQ(measures::mean(p), 1.0);
    EXPECT_DOUBLE_EQ(measures::second_moment(p), 2.0);
    EXPECT_DOUBLE_EQ(measures::variance(p), 1.0);
}

TEST(Dominance, PrefixSumExamples) {
    // [1,1] vs [0,2]: prefixes [1,2] and [0,2].
    EXPECT_TRUE(measures::ssd_dominates({1.0, 1.0}, {0.0, 2.0}));
    EXPECT_FALSE(measures::ssd_dominates({0.0, 2.0}, {1.0, 1.0}));
    EXPECT_EQ(measures::compare({1.0, 1.0}, {0.0, 2.0}), measures::DominanceVerdict::FirstDominates);
    EXPECT_EQ(measures::compare({0.0, 3.0}, {1.0, 2.0}), measures::DominanceVerdict::SecondDominates);
    EXPECT_EQ(measures::compare({1.0, 2.0}, {2.0, 1.0}), measures::DominanceVerdict::Mutual);
    // Higher mean but fatter left tail: neither dominates.
    EXPECT_EQ(measures::compare({-3.0, 10.0}, {0.0, 1.0}), measures::DominanceVerdict::Incomparable);
}

TEST(Dominance, SizeMismatchThrows) {
    EXPECT_THROW(measures::ssd_dominates({1.0}, {1.0, 2.0}), SizeMismatchError);
}

TEST(Dominance, SlackAbsorbsSmallDeficit) {
    EXPECT_FALSE(measures::ssd_dominates({1.0, 1.0}, {1.0, 1.001}));
    EXPECT_TRUE(measures::ssd_dominates({1.0, 1.0}, {1.0, 1.001}, 1e-2));
}

TEST(Dominance, ReflexiveAndTransitive) {
    // Small integers keep every prefix sum exact, so chains are decided without rounding.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> ud(-3, 3);
    auto draw = [&] {
        std::vector<double> v(4);
        for (auto& x : v) {
            x = ud(rng);
        }
        return ParticleSet(v);
    };
    int chains = 0;
    for (int k = 0; k < 20000; ++k) {
        const auto a = draw();
        const auto b = draw();
        const auto c = draw();
        EXPECT_TRUE(measures::ssd_dominates(a, a));
        if (measures::ssd_dominates(a, b) && measures::ssd_dominates(b, c)) {
            ++chains;
            EXPECT_TRUE(measures::ssd_dominates(a, c));
        }
    }
    EXPECT_GT(chains, 100);
}

TEST(CumulativeCdf, MatchesIntegralOfStepCdf) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const auto p = random_set(rng, 7);
        const double alpha = std::uniform_real_distribution<double>(-6.0, 6.0)(rng);
        // Riemann sum of the empirical CDF from far below the support.
        const double lo = -6.0;
        const int cells = 200000;
        const double dx = (alpha - lo) / cells;
        double integral = 0.0;
        for (int c = 0; c < cells; ++c) {
            const double x = lo + (c + 0.5) * dx;
            integral += dx * static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= x; })) /
                        static_cast<double>(p.size());
        }
        EXPECT_NEAR(measures::cumulative_cdf_f2(p, alpha), integral, 1e-3);
    }
}

TEST(CumulativeQuantile, GridValuesAndInterpolation) {
    const ParticleSet p{1.0, 2.0, 3.0, 6.0};
    EXPECT_DOUBLE_EQ(measures::cumulative_quantile_f_neg2(p, 0.25), 0.25);
    EXPECT_DOUBLE_EQ(measures::cumulative_quantile_f_neg2(p, 0.5), 0.75);
    EXPECT_DOUBLE_EQ(measures::cumulative_quantile_f_neg2(p, 1.0), 3.0);
    EXPECT_DOUBLE_EQ(measures::cumulative_quantile_f_neg2(p, 0.375), 0.5);
    EXPECT_THROW(measures::cumulative_quantile_f_neg2(p, 0.0), DomainError);
    EXPECT_THROW(measures::cumulative_quantile_f_neg2(p, 1.5), DomainError);
}

TEST(Cvar, LowerTailMean) {
    const ParticleSet p{1.0, 2.0, 3.0, 6.0};
    EXPECT_DOUBLE_EQ(measures::cvar(p, 0.5), 1.5);
    EXPECT_DOUBLE_EQ(measures::cvar(p, 1.0), measures::mean(p));
    EXPECT_DOUBLE_EQ(measures::cvar({1.0, 1.0}, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(measures::cvar({0.0, 2.0}, 0.5), 0.0);
}

TEST(Properties, DominanceOrdersFirstTwoMoments) {
    // a dominates b with equal means implies a has the smaller second moment.
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int k = 0; k < 2000; ++k) {
        const auto b = random_set(rng, 6);
        const double m = measures::mean(b);
        std::vector<double> av;
        for (double x : b) {
            av.push_back(m + 0.7 * (x - m));
        }
        const ParticleSet a(av);
        if (!measures::ssd_dominates(a, b)) {
            continue;
        }
        ++checked;
        EXPECT_GE(measures::mean(a) + 1e-12, measures::mean(b));
        EXPECT_LE(measures::second_moment(a), measures::second_moment(b) + 1e-12);
    }
    EXPECT_GT(checked, 1000);
}
