#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssdrl/measures.hpp"

namespace ssdrl::transport {

using measures::ParticleSet;

// Dense row-major matrix, just enough for cost matrices and coupling plans.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Decreasing sequence of entropic temperatures for log-domain Sinkhorn.
///
/// Every temperature but the last runs `inner_iterations` sweeps; the last one
/// runs until the largest change in the target potential drops below
/// `tolerance`, or `max_final_iterations` sweeps have been made. A final
/// temperature still unconverged after `newton_after` sweeps gets Newton
/// iterations on the dual before sweeping resumes, retried at 2x, 4x, ...
/// that count (0 turns this off).
struct AnnealingSchedule {
    std::vector<double> temperatures;
    std::size_t inner_iterations = 20;
    std::size_t max_final_iterations = 20000;
    double tolerance = 1e-9;
    std::size_t newton_after = 50;

    // start, start*ratio, start*ratio^2, ... while above `final_epsilon`, then `final_epsilon`.
    static AnnealingSchedule geometric(double final_epsilon, double start = 1.0, double ratio = 0.5,
                                       std::size_t inner_iterations = 20);

    double final_temperature() const { return temperatures.back(); }
    void validate() const;
};

struct TransportResult {
    std::vector<double> f;  // source potential
    std::vector<double> g;  // target potential
    Matrix plan;
    double distance = 0.0;
    double epsilon_final = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

Matrix cost_matrix(const ParticleSet& x, const ParticleSet& y);

TransportResult sinkhorn_log(const ParticleSet& x, const ParticleSet& y, const AnnealingSchedule& schedule);

// Runs only the final temperature of `schedule`, starting from the duals of a
// previous solve (`warm`) on nearby supports. Falls back to the full schedule
// when `warm` does not match the problem shape or temperature.
TransportResult sinkhorn_log(const ParticleSet& x, const ParticleSet& y, const AnnealingSchedule& schedule,
                             const TransportResult& warm);

// Exact squared 2-Wasserstein distance between equal-size uniform 1-D measures.
double exact_w2_1d(const ParticleSet& x, const ParticleSet& y);

// d distance / d x_i with the plan held fixed: sum_j plan_ij * 2 (x_i - y_j).
std::vector<double> sinkhorn_gradient_source(const TransportResult& result, const ParticleSet& x,
                                             const ParticleSet& y);

}  // namespace ssdrl::transport
