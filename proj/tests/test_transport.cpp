#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ssdrl/errors.hpp"
#include "ssdrl/transport.hpp"

using namespace ssdrl;
using measures::ParticleSet;
using transport::AnnealingSchedule;

namespace {

ParticleSet random_set(std::mt19937_64& rng, std::size_t n, double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return ParticleSet(v);
}

// Sorted values with neighbours at least `gap` apart.
ParticleSet separated_set(std::mt19937_64& rng, std::size_t n, double gap) {
    std::uniform_real_distribution<double> u(gap, 1.0);
    std::vector<double> v;
    double x = std::uniform_real_distribution<double>(-3.0, -1.0)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(x);
        x += u(rng);
    }
    return ParticleSet(v);
}

double max_marginal_error(const transport::TransportResult& r) {
    double err = 0.0;
    const auto rows = r.plan.row_sums();
    const auto cols = r.plan.col_sums();
    for (double s : rows) {
        err = std::max(err, std::abs(s - 1.0 / static_cast<double>(rows.size())));
    }
    for (double s : cols) {
        err = std::max(err, std::abs(s - 1.0 / static_cast<double>(cols.size())));
    }
    return err;
}

}  // namespace

TEST(CostMatrix, Examples) {
    const auto a = transport::cost_matrix({0.0}, {2.0});
    EXPECT_EQ(a(0, 0), 4.0);
    const auto b = transport::cost_matrix({0.0, 1.0}, {0.0, 1.0});
    EXPECT_EQ(b(0, 0), 0.0);
    EXPECT_EQ(b(0, 1), 1.0);
    EXPECT_EQ(b(1, 0), 1.0);
    EXPECT_EQ(b(1, 1), 0.0);
    const auto c = transport::cost_matrix({1.0}, {-1.0, 3.0});
    EXPECT_EQ(c(0, 0), 4.0);
    EXPECT_EQ(c(0, 1), 4.0);
}

TEST(Schedule, GeometricLadder) {
    const auto s = AnnealingSchedule::geometric(0.1);
    const std::vector<double> expected{1.0, 0.5, 0.25, 0.125, 0.1};
    EXPECT_EQ(s.temperatures, expected);
    EXPECT_EQ(AnnealingSchedule::geometric(1.0).temperatures, std::vector<double>{1.0});
}

TEST(Schedule, RejectsIncreasingOrNonPositive) {
    AnnealingSchedule s;
    s.temperatures = {0.5, 1.0};
    EXPECT_THROW(s.validate(), DomainError);
    s.temperatures = {1.0, 0.0};
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(Sinkhorn, SinglePairIsForced) {
    for (double eps : {1.0, 0.1, 0.005}) {
        const auto r = transport::sinkhorn_log({0.0}, {2.0}, AnnealingSchedule::geometric(eps));
        EXPECT_NEAR(r.distance, 4.0, 1e-12);
        EXPECT_NEAR(r.plan(0, 0), 1.0, 1e-12);
    }
}

TEST(Sinkhorn, IdenticalPairsNearDiagonal) {
    const auto r = transport::sinkhorn_log({0.0, 1.0}, {0.0, 1.0}, AnnealingSchedule::geometric(0.01));
    EXPECT_LE(r.distance, 0.05);
    EXPECT_NEAR(r.plan(0, 0), 0.5, 1e-3);
    EXPECT_NEAR(r.plan(1, 1), 0.5, 1e-3);
    EXPECT_NEAR(r.plan(0, 1), 0.0, 1e-3);
    EXPECT_NEAR(r.plan(1, 0), 0.0, 1e-3);
}

TEST(Sinkhorn, ShiftedPairs) {
    const auto r = transport::sinkhorn_log({0.0, 1.0}, {2.0, 3.0}, AnnealingSchedule::geometric(0.01));
    EXPECT_NEAR(r.distance, 4.0, 0.1);
}

TEST(Sinkhorn, EpsilonFinalRecorded) {
    const auto r = transport::sinkhorn_log({0.0, 1.0}, {2.0, 3.0}, AnnealingSchedule::geometric(0.3));
    EXPECT_EQ(r.epsilon_final, 0.3);
    EXPECT_TRUE(r.converged);
}

TEST(Sinkhorn, MarginalsSymmetryAndNonNegativity) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const auto x = random_set(rng, 10);
        const auto y = random_set(rng, 10);
        const auto s = AnnealingSchedule::geometric(0.05);
        const auto xy = transport::sinkhorn_log(x, y, s);
        const auto yx = transport::sinkhorn_log(y, x, s);
        EXPECT_LE(max_marginal_error(xy), 1e-6);
        EXPECT_NEAR(xy.distance, yx.distance, 1e-8);
        EXPECT_GE(xy.distance, -1e-9);
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = 0; j < 10; ++j) {
                EXPECT_GE(xy.plan(i, j), 0.0);
            }
        }
    }
}

TEST(Sinkhorn, UnequalSizesKeepMarginals) {
    std::mt19937_64 rng(4);
    const auto x = random_set(rng, 5);
    const auto y = random_set(rng, 9);
    const auto r = transport::sinkhorn_log(x, y, AnnealingSchedule::geometric(0.1));
    EXPECT_EQ(r.plan.rows(), 5u);
    EXPECT_EQ(r.plan.cols(), 9u);
    EXPECT_LE(max_marginal_error(r), 1e-6);
}

TEST(Sinkhorn, ApproachesExactDistance) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        const auto x = random_set(rng, 16);
        const auto y = random_set(rng, 16);
        const double exact = transport::exact_w2_1d(x, y);
        const auto r = transport::sinkhorn_log(x, y, AnnealingSchedule::geometric(0.005));
        EXPECT_LE(std::abs(r.distance - exact) / std::max(exact, 1.0), 0.05);
    }
}

TEST(Sinkhorn, WarmStartMatchesColdSolve) {
    std::mt19937_64 rng(9);
    const auto x = random_set(rng, 12);
    const auto y = random_set(rng, 12);
    const auto s = AnnealingSchedule::geometric(0.1);
    const auto cold = transport::sinkhorn_log(x, y, s);
    const auto x2 = x.shifted(1e-3);
    const auto warm = transport::sinkhorn_log(x2, y, s, cold);
    const auto ref = transport::sinkhorn_log(x2, y, s);
    EXPECT_NEAR(warm.distance, ref.distance, 1e-8);
}

TEST(ExactW2, Examples) {
    EXPECT_DOUBLE_EQ(transport::exact_w2_1d({0.0, 1.0}, {2.0, 3.0}), 4.0);
    EXPECT_DOUBLE_EQ(transport::exact_w2_1d({0.5, 1.5, 7.0}, {0.5, 1.5, 7.0}), 0.0);
    EXPECT_DOUBLE_EQ(transport::exact_w2_1d({0.0}, {3.0}), 9.0);
    EXPECT_THROW(transport::exact_w2_1d({0.0}, {1.0, 2.0}), SizeMismatchError);
}

TEST(Gradient, SinglePair) {
    const ParticleSet x{0.0};
    const ParticleSet y{2.0};
    const auto r = transport::sinkhorn_log(x, y, AnnealingSchedule::geometric(0.1));
    const auto g = transport::sinkhorn_gradient_source(r, x, y);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_NEAR(g[0], -4.0, 1e-12);
}

TEST(Gradient, SelfTransportIsStationary) {
    const ParticleSet x{-1.0, 0.5, 2.0};
    const auto r = transport::sinkhorn_log(x, x, AnnealingSchedule::geometric(0.01));
    for (double v : transport::sinkhorn_gradient_source(r, x, x)) {
        EXPECT_NEAR(v, 0.0, 1e-3);
    }
}

TEST(Gradient, MatchesFiniteDifferences) {
    std::mt19937_64 rng(21);
    auto schedule = AnnealingSchedule::geometric(0.1);
    schedule.tolerance = 1e-14;
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k) {
        const auto x = separated_set(rng, 8, 1e-2);
        const auto y = separated_set(rng, 8, 1e-2);
        const auto r = transport::sinkhorn_log(x, y, schedule);
        const auto g = transport::sinkhorn_gradient_source(r, x, y);
        std::vector<double> xv(x.begin(), x.end());
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < xv.size(); ++i) {
            auto plus = xv;
            auto minus = xv;
            plus[i] += h;
            minus[i] -= h;
            const double fd = (transport::sinkhorn_log(ParticleSet(plus), y, schedule).distance -
                               transport::sinkhorn_log(ParticleSet(minus), y, schedule).distance) /
                              (2.0 * h);
            num += (g[i] - fd) * (g[i] - fd);
            den += fd * fd;
        }
        EXPECT_LE(std::sqrt(num / den), 1e-4);
    }
}
