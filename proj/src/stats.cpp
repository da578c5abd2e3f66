#include "ssdrl/stats.hpp"

#include <cmath>
#include <limits>

#include "ssdrl/errors.hpp"

namespace ssdrl::stats {

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_fraction(double x, double a, double b) {
    constexpr int kMaxTerms = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        d = std::fabs(d) < kTiny ? kTiny : d;
        c = 1.0 + aa / c;
        c = std::fabs(c) < kTiny ? kTiny : c;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        d = std::fabs(d) < kTiny ? kTiny : d;
        c = 1.0 + aa / c;
        c = std::fabs(c) < kTiny ? kTiny : c;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return h;
        }
    }
    throw NumericalFailure("incomplete beta continued fraction did not converge", 0.0);
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw DomainError("incomplete beta needs a, b > 0 and x in [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return x;
    }
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // the fraction converges quickly only on this side of the mean
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_fraction(x, a, b) / a;
    }
    return 1.0 - front * beta_fraction(1.0 - x, b, a) / b;
}

double inverse_incomplete_beta(double p, double a, double b) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("probability must lie in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) {
        return p;
    }
    // I_x is increasing in x: bisect to a bracket, then polish with Newton.
    double lo = 0.0;
    double hi = 1.0;
    double x = 0.5;
    for (int it = 0; it < 60; ++it) {
        x = 0.5 * (lo + hi);
        if (incomplete_beta(x, a, b) < p) {
            lo = x;
        } else {
            hi = x;
        }
    }
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    for (int it = 0; it < 20; ++it) {
        const double err = incomplete_beta(x, a, b) - p;
        const double density = std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
        if (!(density > 0.0) || !std::isfinite(density)) {
            break;
        }
        const double next = x - err / density;
        if (!(next > lo && next < hi)) {
            break;
        }
        if (std::fabs(next - x) <= 1e-16 * x) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) {
        throw DomainError("degrees of freedom must be positive");
    }
    const double tail = 0.5 * incomplete_beta(dof / (dof + t * t), 0.5 * dof, 0.5);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    if (!(dof > 0.0)) {
        throw DomainError("degrees of freedom must be positive");
    }
    if (p == 0.5) {
        return 0.0;
    }
    const double tail = p < 0.5 ? p : 1.0 - p;
    const double x = inverse_incomplete_beta(2.0 * tail, 0.5 * dof, 0.5);
    const double t = std::sqrt(dof * (1.0 - x) / x);
    return p < 0.5 ? -t : t;
}

Interval confidence_interval(std::span<const double> samples, double level) {
    const std::size_t m = samples.size();
    if (m < 2) {
        throw DomainError("a confidence interval needs at least two samples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1)");
    }
    double sum = 0.0;
    for (double v : samples) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    const double t = student_t_quantile(0.5 * (1.0 + level), static_cast<double>(m - 1));
    return {mean, t * sd / std::sqrt(static_cast<double>(m))};
}

}  // namespace ssdrl::stats
