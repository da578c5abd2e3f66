#include <gtest/gtest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ssdrl/errors.hpp"
#include "ssdrl/stats.hpp"

using namespace ssdrl;

TEST(StudentT, TableValues) {
    EXPECT_NEAR(stats::student_t_quantile(0.975, 1.0), 12.706, 1e-3);
    EXPECT_NEAR(stats::student_t_quantile(0.975, 49.0), 2.0096, 1e-3);
    EXPECT_NEAR(stats::student_t_quantile(0.5, 7.0), 0.0, 1e-12);
}

TEST(StudentT, AgreesWithBoost) {
    for (double dof : {1.0, 2.0, 3.0, 4.5, 9.0, 29.0, 49.0, 99.0, 1000.0}) {
        const boost::math::students_t dist(dof);
        for (double p : {0.001, 0.025, 0.1, 0.4, 0.6, 0.9, 0.975, 0.995, 0.9999}) {
            const double ref = boost::math::quantile(dist, p);
            EXPECT_NEAR(stats::student_t_quantile(p, dof), ref, 1e-9 * std::max(1.0, std::abs(ref)))
                << "dof " << dof << " p " << p;
        }
        for (double t : {-30.0, -2.0, -0.3, 0.0, 1.0, 4.0}) {
            EXPECT_NEAR(stats::student_t_cdf(t, dof), boost::math::cdf(dist, t), 1e-12);
        }
    }
}

TEST(IncompleteBeta, AgreesWithBoost) {
    for (double a : {0.5, 1.0, 3.0, 24.5}) {
        for (double b : {0.5, 2.0, 10.0}) {
            const boost::math::beta_distribution<double> dist(a, b);
            for (double x : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0}) {
                EXPECT_NEAR(stats::incomplete_beta(x, a, b), boost::math::cdf(dist, x), 1e-12);
            }
            for (double p : {0.01, 0.5, 0.93}) {
                EXPECT_NEAR(stats::inverse_incomplete_beta(p, a, b), boost::math::quantile(dist, p), 1e-10);
            }
        }
    }
}

TEST(StudentT, RejectsBadArguments) {
    EXPECT_THROW(stats::student_t_quantile(0.0, 3.0), DomainError);
    EXPECT_THROW(stats::student_t_quantile(1.0, 3.0), DomainError);
    EXPECT_THROW(stats::student_t_quantile(0.5, 0.0), DomainError);
}

TEST(ConfidenceInterval, Examples) {
    const std::vector<double> flat(10, 3.5);
    const auto a = stats::confidence_interval(flat);
    EXPECT_DOUBLE_EQ(a.mean, 3.5);
    EXPECT_DOUBLE_EQ(a.half_width, 0.0);

    const std::vector<double> two{0.0, 2.0};
    const auto b = stats::confidence_interval(two);
    EXPECT_DOUBLE_EQ(b.mean, 1.0);
    EXPECT_NEAR(b.half_width, 12.706, 1e-2);

    std::vector<double> fifty;
    for (int i = 0; i < 50; ++i) {
        fifty.push_back(i % 2 == 0 ? 1.0 : -1.0);
    }
    const auto c = stats::confidence_interval(fifty);
    // s = sqrt(50/49), half-width = t * s / sqrt(50).
    const double t = c.half_width * std::sqrt(50.0) / std::sqrt(50.0 / 49.0);
    EXPECT_NEAR(t, 2.0096, 1e-3);

    EXPECT_THROW(stats::confidence_interval(std::vector<double>{1.0}), DomainError);
}

TEST(ConfidenceInterval, OverlapAndContainment) {
    const stats::Interval a{0.0, 1.0};
    const stats::Interval b{1.5, 0.6};
    const stats::Interval c{3.0, 0.5};
    EXPECT_TRUE(a.overlaps(b));
    EXPECT_FALSE(a.overlaps(c));
    EXPECT_TRUE(a.contains(-1.0));
    EXPECT_FALSE(a.contains(1.0001));
}
