#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ssdrl/errors.hpp"
#include "ssdrl/proximal.hpp"

using namespace ssdrl;
using measures::ParticleSet;
using wgf::BellmanTarget;
using wgf::ProximalConfig;

namespace {

ParticleSet separated_set(std::mt19937_64& rng, std::size_t n, double gap, double start_lo = -3.0) {
    std::uniform_real_distribution<double> u(gap, 1.0);
    std::vector<double> v;
    double x = std::uniform_real_distribution<double>(start_lo, start_lo + 2.0)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(x);
        x += u(rng);
    }
    return ParticleSet(v);
}

ProximalConfig at_temperature(double eps) {
    ProximalConfig c;
    c.temperatures = {eps};
    return c;
}

}  // namespace

TEST(BellmanTargets, Examples) {
    const auto t = wgf::bellman_targets(1.0, 0.9, {0.0, 2.0});
    EXPECT_DOUBLE_EQ(t[0], 1.0);
    EXPECT_DOUBLE_EQ(t[1], 2.8);
    const auto term = wgf::bellman_targets(-100.0, 0.0, {3.0, 7.0});
    EXPECT_EQ(term[0], -100.0);
    EXPECT_EQ(term[1], -100.0);
    const ParticleSet p{-1.0, 0.5, 4.0};
    EXPECT_EQ(wgf::bellman_targets(0.0, 1.0, p).particles(), p);
    EXPECT_THROW(wgf::bellman_targets(0.0, 1.5, p), DomainError);
}

TEST(PotentialEnergy, Examples) {
    EXPECT_DOUBLE_EQ(wgf::potential_energy(BellmanTarget({1.0, 3.0}), {0.0, 2.0}), 0.5);
    EXPECT_DOUBLE_EQ(wgf::potential_energy(BellmanTarget({1.0, 3.0}), {1.0, 3.0}), 0.0);
    EXPECT_DOUBLE_EQ(wgf::potential_energy(BellmanTarget({5.0}), {3.0}), 2.0);
    EXPECT_THROW(wgf::potential_energy(BellmanTarget({5.0}), {3.0, 4.0}), SizeMismatchError);
}

TEST(ProximalLoss, Examples) {
    const ProximalConfig c = at_temperature(0.01);
    const ParticleSet z{-0.5, 0.25, 1.0};
    EXPECT_LE(wgf::proximal_loss(z, z, BellmanTarget(z), c), 0.05);
    EXPECT_NEAR(wgf::proximal_loss({0.0}, {0.0}, BellmanTarget({2.0}), c), 4.0, 1e-6);
    EXPECT_NEAR(wgf::proximal_loss({1.0}, {0.0}, BellmanTarget({1.0}), c), 1.0, 1e-6);
}

TEST(ProximalGradient, Examples) {
    const ProximalConfig c = at_temperature(0.01);
    const ParticleSet z{-0.5, 0.25, 1.0};
    for (double g : wgf::proximal_loss_gradient(z, z, BellmanTarget(z), c)) {
        EXPECT_NEAR(g, 0.0, 1e-2);
    }
    const auto g = wgf::proximal_loss_gradient({0.0}, {0.0}, BellmanTarget({2.0}), c);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_NEAR(g[0], -4.0, 1e-3);
}

TEST(ProximalGradient, MatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    ProximalConfig c;
    c.sinkhorn_tolerance = 1e-14;
    const double h = 1e-5;
    for (int k = 0; k < 10; ++k) {
        const auto z = separated_set(rng, 8, 1e-2);
        const auto z_prev = separated_set(rng, 8, 1e-2);
        const BellmanTarget t(separated_set(rng, 8, 1e-2, 0.0));
        const auto g = wgf::proximal_loss_gradient(z, z_prev, t, c);
        std::vector<double> zv(z.begin(), z.end());
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < zv.size(); ++i) {
            auto plus = zv;
            auto minus = zv;
            plus[i] += h;
            minus[i] -= h;
            const double fd = (wgf::proximal_loss(ParticleSet(plus), z_prev, t, c) -
                               wgf::proximal_loss(ParticleSet(minus), z_prev, t, c)) /
                              (2.0 * h);
            num += (g[i] - fd) * (g[i] - fd);
            den += fd * fd;
        }
        EXPECT_LE(std::sqrt(num / den), 1e-4);
    }
}

TEST(ProximalStep, SingleParticleMatchesScalarMinimizer) {
    ProximalConfig c = at_temperature(0.01);
    c.max_gradient_steps = 200;
    c.loss_tolerance = 0.0;
    const auto out = wgf::proximal_step({0.0}, BellmanTarget({2.0}), c);
    // Grid search of x^2 + 2h * (1/2)(x - 2)^2 on [0, 2].
    double best_x = 0.0;
    double best = 1e300;
    for (int i = 0; i <= 200000; ++i) {
        const double x = 2.0 * i / 200000.0;
        const double v = x * x + c.h * (x - 2.0) * (x - 2.0);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    EXPECT_GT(out[0], 0.0);
    EXPECT_LE(out[0], 2.0);
    EXPECT_NEAR(out[0], best_x, 1e-4);
}

TEST(ProximalStep, LargerStepSizeMovesCloserToTarget) {
    ProximalConfig c = at_temperature(0.01);
    c.max_gradient_steps = 200;
    c.h = 4.0;
    const auto out = wgf::proximal_step({0.0}, BellmanTarget({2.0}), c);
    EXPECT_GT(out[0], 1.0);
    EXPECT_NEAR(out[0], 2.0 * c.h / (1.0 + c.h), 1e-3);
}

TEST(ProximalStep, FixedPointIsPreserved) {
    std::mt19937_64 rng(13);
    ProximalConfig c;
    c.temperatures = {1.0, 0.5, 0.25, 0.01};
    for (int k = 0; k < 20; ++k) {
        // Entropic blur pulls particles closer than about sqrt(0.01) toward each other.
        const auto z = separated_set(rng, 8, 0.5);
        const auto out = wgf::proximal_step(z, BellmanTarget(z), c);
        for (std::size_t i = 0; i < z.size(); ++i) {
            EXPECT_LE(std::abs(out[i] - z[i]), 1e-2);
        }
    }
}

TEST(ProximalStep, LossNonIncreasingAndPotentialContracts) {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (int k = 0; k < 10; ++k) {
        std::vector<double> a(12);
        std::vector<double> b(12);
        for (auto& v : a) {
            v = nd(rng);
        }
        for (auto& v : b) {
            v = nd(rng) - 3.0;
        }
        const ParticleSet z(a);
        const BellmanTarget t{ParticleSet(b)};
        wgf::ProximalTrace trace;
        const auto out = wgf::proximal_step(z, t, ProximalConfig{}, &trace);
        ASSERT_GE(trace.losses.size(), 2u);
        for (std::size_t i = 1; i < trace.losses.size(); ++i) {
            EXPECT_LE(trace.losses[i] - trace.losses[i - 1], 1e-9);
        }
        EXPECT_LE(wgf::potential_energy(t, out), wgf::potential_energy(t, z));
        EXPECT_EQ(trace.losses.size(), trace.temperatures.size());
    }
}

TEST(ProximalStep, StopsAtMaxGradientSteps) {
    ProximalConfig c;
    c.max_gradient_steps = 3;
    c.loss_tolerance = 0.0;
    wgf::ProximalTrace trace;
    wgf::proximal_step({-1.0, 0.0, 1.0}, BellmanTarget({4.0, 5.0, 6.0}), c, &trace);
    EXPECT_LE(trace.accepted_steps, 3u);
}

TEST(ProximalStep, HugeStepSizeDiverges) {
    ProximalConfig c;
    c.gradient_step_size = 1e9;
    try {
        wgf::proximal_step({-1.0, 0.0, 1.0}, BellmanTarget({4.0, 5.0, 6.0}), c);
        FAIL() << "expected a divergence error";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.step(), 1u);
    }
}

TEST(ProximalConfigTest, TemperatureLadder) {
    EXPECT_EQ(ProximalConfig::temperature_ladder(0.25), (std::vector<double>{1.0, 0.5, 0.25}));
    EXPECT_EQ(ProximalConfig::temperature_ladder(0.9), (std::vector<double>{1.0, 0.9}));
    EXPECT_EQ(ProximalConfig::temperature_ladder(0.01), (std::vector<double>{1.0, 0.5, 0.01}));
    EXPECT_EQ(ProximalConfig::temperature_ladder(1.0), (std::vector<double>{1.0}));
}

TEST(ProximalConfigTest, Validation) {
    ProximalConfig c;
    c.h = 0.0;
    EXPECT_THROW(c.validate(), DomainError);
    c = ProximalConfig{};
    c.max_gradient_steps = 0;
    EXPECT_THROW(c.validate(), DomainError);
    c = ProximalConfig{};
    c.gradient_step_size = -1.0;
    EXPECT_THROW(c.validate(), DomainError);
}
