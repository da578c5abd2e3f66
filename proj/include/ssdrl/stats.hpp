#pragma once

#include <span>

namespace ssdrl::stats {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double x, double a, double b);
// x with I_x(a, b) = p.
double inverse_incomplete_beta(double p, double a, double b);

double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;

    double lower() const { return mean - half_width; }
    double upper() const { return mean + half_width; }
    bool contains(double v) const { return v >= lower() && v <= upper(); }
    bool overlaps(const Interval& other) const { return lower() <= other.upper() && other.lower() <= upper(); }
};

// mean +- t_{(1+level)/2, M-1} * s / sqrt(M); needs at least two samples.
Interval confidence_interval(std::span<const double> samples, double level = 0.95);

}  // namespace ssdrl::stats
