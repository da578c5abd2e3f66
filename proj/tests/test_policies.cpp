#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "ssdrl/errors.hpp"
#include "ssdrl/policies.hpp"

using namespace ssdrl;
using measures::ParticleSet;
using namespace ssdrl::policies;

namespace {

std::vector<double> frequencies(const std::function<int(Rng&)>& pick, std::size_t actions, int draws,
                                std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> f(actions, 0.0);
    for (int k = 0; k < draws; ++k) {
        f[static_cast<std::size_t>(pick(rng))] += 1.0;
    }
    for (auto& v : f) {
        v /= draws;
    }
    return f;
}

// Within three binomial standard deviations of p over n draws.
void expect_binomial(double observed, double p, int n) {
    EXPECT_NEAR(observed, p, 3.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12);
}

}  // namespace

TEST(GreedySet, Examples) {
    const std::vector<ParticleSet> d1{{1.0}, {2.0}, {2.0}};
    EXPECT_EQ(greedy_set(d1, 0.0), (std::vector<int>{1, 2}));
    const std::vector<ParticleSet> d2{{1.0}, {2.0}, {1.9999}};
    EXPECT_EQ(greedy_set(d2, 1e-3), (std::vector<int>{1, 2}));
    EXPECT_EQ(greedy_set(d2, 0.0), (std::vector<int>{1}));
    const std::vector<ParticleSet> d3{{-4.0}};
    EXPECT_EQ(greedy_set(d3, 0.0), (std::vector<int>{0}));
    EXPECT_THROW(greedy_set(std::span<const ParticleSet>{}, 0.0), DomainError);
}

TEST(SsdSelect, LowerSpreadWins) {
    const std::vector<ParticleSet> d{{1.0, 1.0}, {0.0, 2.0}};
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        EXPECT_EQ(ssd_select(d, 1e-6, rng), 0);
    }
}

TEST(SsdSelect, PrefixSumDominance) {
    const std::vector<ParticleSet> d{{0.0, 3.0}, {1.0, 2.0}};
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        EXPECT_EQ(ssd_select(d, 1e-6, rng), 1);
    }
}

TEST(SsdSelect, IncomparableFallsBackToUniform) {
    // Crossing prefix sums: [-2, 0, 3] against [-1, -1, 3].
    const std::vector<ParticleSet> crossing{{-2.0, 2.0, 3.0}, {-1.0, 0.0, 4.0}};
    ASSERT_TRUE(ssd_dominant_set(crossing, 1e-9).empty());
    const int n = 10000;
    const auto f = frequencies([&](Rng& r) { return ssd_select(crossing, 1e-9, r); }, 2, n, 3);
    expect_binomial(f[0], 0.5, n);
}

TEST(SsdSelect, NonCompetitorsIgnored) {
    // Action 2 dominates everything but has a much lower mean, so it is not a competitor.
    const std::vector<ParticleSet> d{{0.0, 4.0}, {1.0, 3.0}, {-5.0, -5.0}};
    Rng rng(4);
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(ssd_select(d, 1e-6, rng), 1);
    }
}

TEST(SsdSelect, MutualDominanceSharesProbability) {
    const std::vector<ParticleSet> d{{1.0, 2.0}, {2.0, 1.0}, {0.0, 3.0}};
    EXPECT_EQ(ssd_dominant_set(d, 1e-9), (std::vector<int>{0, 1}));
    PolicyConfig cfg;
    cfg.kind = PolicyKind::Ssd;
    const auto p = action_distribution(cfg, d).probabilities;
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
    EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(SsdSelect, PicksSmallestSecondMomentAmongDominated) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    Rng rng(6);
    int checked = 0;
    for (int k = 0; k < 500; ++k) {
        // Equal-mean competitors obtained by scaling one centred shape.
        std::vector<double> shape(6);
        for (auto& v : shape) {
            v = nd(gen);
        }
        const double m = std::accumulate(shape.begin(), shape.end(), 0.0) / 6.0;
        std::vector<ParticleSet> d;
        for (double s : {1.0, 0.5, 2.0}) {
            std::vector<double> v;
            for (double x : shape) {
                v.push_back(3.0 + s * (x - m));
            }
            d.emplace_back(v);
        }
        const int a = ssd_select(d, 1e-9, rng);
        for (std::size_t b = 0; b < d.size(); ++b) {
            if (measures::ssd_dominates(d[a], d[b])) {
                EXPECT_LE(measures::second_moment(d[a]), measures::second_moment(d[b]) + 1e-12);
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(CvarSelect, Examples) {
    const std::vector<ParticleSet> d{{1.0, 1.0}, {0.0, 2.0}};
    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(cvar_select(d, 0.5, rng), 0);
    }
    // At level 1 CVaR is the mean.
    const std::vector<ParticleSet> m{{0.0, 1.0}, {-10.0, 12.0}};
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(cvar_select(m, 1.0, rng), 1);
    }
    const std::vector<ParticleSet> same{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    const int n = 10000;
    const auto f = frequencies([&](Rng& r) { return cvar_select(same, 0.3, r); }, 3, n, 8);
    for (double v : f) {
        expect_binomial(v, 1.0 / 3.0, n);
    }
}

TEST(EpsilonGreedy, Degenerate) {
    const std::vector<ParticleSet> d{{0.0}, {5.0}, {1.0}, {2.0}};
    Rng rng(9);
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(epsilon_greedy_select(d, 0.0, 0.0, rng), 1);
    }
    const int n = 10000;
    const auto f = frequencies([&](Rng& r) { return epsilon_greedy_select(d, 1.0, 0.0, r); }, 4, n, 10);
    for (double v : f) {
        expect_binomial(v, 0.25, n);
    }
}

TEST(EpsilonGreedy, TwoActions) {
    const std::vector<ParticleSet> d{{0.0}, {5.0}};
    const int n = 10000;
    const auto f = frequencies([&](Rng& r) { return epsilon_greedy_select(d, 0.1, 0.0, r); }, 2, n, 11);
    expect_binomial(f[1], 0.95, n);
}

TEST(ActionDistributionTest, NormalizedForEveryKind) {
    const std::vector<ParticleSet> d{{0.0, 4.0}, {1.0, 3.0}, {-1.0, 0.0}, {2.0, 2.0}};
    for (const char* spec : {"greedy", "egreedy", "egreedy@0.3", "ssd", "cvar@0.05", "cvar@1"}) {
        auto cfg = PolicyConfig::parse(spec);
        cfg.explore = 0.2;
        const auto p = action_distribution(cfg, d).probabilities;
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12) << spec;
        for (double v : p) {
            EXPECT_GE(v, 0.0);
        }
    }
}

TEST(ActionDistributionTest, MatchesSampling) {
    const std::vector<ParticleSet> d{{0.0, 4.0}, {1.0, 3.0}, {-1.0, 0.0}, {2.0, 2.0}};
    for (const char* spec : {"egreedy", "ssd", "cvar@0.5"}) {
        auto cfg = PolicyConfig::parse(spec);
        cfg.explore = 0.1;
        const auto p = action_distribution(cfg, d).probabilities;
        const int n = 20000;
        const auto f = frequencies([&](Rng& r) { return select_action(cfg, d, r); }, 4, n, 12);
        for (std::size_t a = 0; a < 4; ++a) {
            expect_binomial(f[a], p[a], n);
        }
    }
}

TEST(Properties, CommonShiftLeavesChoiceUnchanged) {
    std::mt19937_64 gen(13);
    std::uniform_int_distribution<int> ud(-4, 4);
    for (int k = 0; k < 300; ++k) {
        std::vector<ParticleSet> d;
        std::vector<ParticleSet> shifted;
        for (int a = 0; a < 4; ++a) {
            std::vector<double> v(4);
            for (auto& x : v) {
                x = ud(gen);
            }
            d.emplace_back(v);
            shifted.push_back(d.back().shifted(8.0));
        }
        for (const char* spec : {"ssd", "cvar@0.25", "cvar@0.5"}) {
            const auto cfg = PolicyConfig::parse(spec);
            EXPECT_EQ(action_distribution(cfg, d).probabilities, action_distribution(cfg, shifted).probabilities);
        }
    }
}

TEST(PolicyConfigTest, Parsing) {
    EXPECT_EQ(PolicyConfig::parse("ssd").kind, PolicyKind::Ssd);
    EXPECT_EQ(PolicyConfig::parse("greedy").kind, PolicyKind::Greedy);
    EXPECT_DOUBLE_EQ(PolicyConfig::parse("egreedy@0.2").epsilon, 0.2);
    EXPECT_DOUBLE_EQ(PolicyConfig::parse("egreedy").epsilon, 0.1);
    EXPECT_DOUBLE_EQ(PolicyConfig::parse("cvar@0.05").alpha, 0.05);
    EXPECT_THROW(PolicyConfig::parse("softmax"), ConfigError);
    EXPECT_THROW(PolicyConfig::parse("cvar@0"), ConfigError);
    EXPECT_THROW(PolicyConfig::parse("egreedy@1.5"), ConfigError);
    EXPECT_THROW(PolicyConfig::parse("cvar@abc"), ConfigError);
    EXPECT_EQ(PolicyConfig::parse("cvar@0.05").name(), "cvar@0.05");
    EXPECT_EQ(PolicyConfig::parse("ssd").name(), "ssd");
}
