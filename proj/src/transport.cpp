#include "ssdrl/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "ssdrl/errors.hpp"

namespace ssdrl::transport {

std::vector<double> Matrix::row_sums() const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out[i] += (*this)(i, j);
        }
    }
    return out;
}

std::vector<double> Matrix::col_sums() const {
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out[j] += (*this)(i, j);
        }
    }
    return out;
}

AnnealingSchedule AnnealingSchedule::geometric(double final_epsilon, double start, double ratio,
                                               std::size_t inner_iterations) {
    if (!(final_epsilon > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
        throw DomainError("geometric schedule needs final_epsilon > 0 and ratio in (0,1)");
    }
    AnnealingSchedule s;
    s.inner_iterations = inner_iterations;
    for (double eps = start; eps > final_epsilon; eps *= ratio) {
        s.temperatures.push_back(eps);
    }
    s.temperatures.push_back(final_epsilon);
    return s;
}

void AnnealingSchedule::validate() const {
    if (temperatures.empty()) {
        throw DomainError("annealing schedule is empty");
    }
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
        if (!(temperatures[k] > 0.0) || !std::isfinite(temperatures[k])) {
            throw DomainError("annealing temperatures must be positive");
        }
        if (k > 0 && temperatures[k] > temperatures[k - 1]) {
            throw DomainError("annealing temperatures must be non-increasing");
        }
    }
}

Matrix cost_matrix(const ParticleSet& x, const ParticleSet& y) {
    Matrix c(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double d = x[i] - y[j];
            c(i, j) = d * d;
        }
    }
    return c;
}

namespace {

// One half-sweep: out_k = -eps * log sum_l exp((other_l - C_kl)/eps + log w_l).
// `transposed` selects whether k indexes columns (target update) or rows.
void soft_min_update(const Matrix& cost, std::span<const double> other, double log_weight, double eps,
                     bool transposed, std::vector<double>& out, std::vector<double>& scratch) {
    const std::size_t n_out = transposed ? cost.cols() : cost.rows();
    const std::size_t n_in = transposed ? cost.rows() : cost.cols();
    scratch.resize(n_in);
    const double inv_eps = 1.0 / eps;
    for (std::size_t k = 0; k < n_out; ++k) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < n_in; ++l) {
            const double c = transposed ? cost(l, k) : cost(k, l);
            scratch[l] = (other[l] - c) * inv_eps;
            peak = std::max(peak, scratch[l]);
        }
        double acc = 0.0;
        for (std::size_t l = 0; l < n_in; ++l) {
            acc += std::exp(scratch[l] - peak);
        }
        out[k] = -eps * (peak + std::log(acc) + log_weight);
    }
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct SinkhornState {
    std::vector<double> f;
    std::vector<double> g;
    std::size_t iterations = 0;
    bool converged = false;
};

// Sinkhorn sweeps in scaling form: f = fa + eps log u, g = ga + eps log v with
// the kernel exp((fa_i + ga_j - C_ij)/eps) rebuilt whenever the scalings drift
// far from one. The iterates are those of the log-domain updates; only the
// exponentials move out of the inner loop.
class ScaledSweeps {
public:
    ScaledSweeps(const Matrix& cost, double eps, std::vector<double>& f, std::vector<double>& g)
        : cost_(cost), eps_(eps), fa_(f), ga_(g), u_(f.size(), 1.0), v_(g.size(), 1.0),
          kernel_(f.size() * g.size()), sums_(std::max(f.size(), g.size())) {
        rebuild();
    }

    // One g-then-f sweep. Falls back to a log-domain sweep when the kernel
    // underflows along a whole row or column.
    void sweep() {
        if (!scale(true) || !scale(false)) {
            log_sweep();
            return;
        }
        constexpr double kDrift = 1e100;
        for (double x : u_) {
            if (x > kDrift || x < 1.0 / kDrift) {
                absorb();
                return;
            }
        }
        for (double x : v_) {
            if (x > kDrift || x < 1.0 / kDrift) {
                absorb();
                return;
            }
        }
    }

    void target_potential(std::vector<double>& g) const {
        g.resize(ga_.size());
        for (std::size_t j = 0; j < ga_.size(); ++j) {
            g[j] = ga_[j] + eps_ * std::log(v_[j]);
        }
    }

    void export_potentials(std::vector<double>& f, std::vector<double>& g) const {
        f.resize(fa_.size());
        for (std::size_t i = 0; i < fa_.size(); ++i) {
            f[i] = fa_[i] + eps_ * std::log(u_[i]);
        }
        target_potential(g);
    }

private:
    void rebuild() {
        const std::size_t n = fa_.size();
        const std::size_t m = ga_.size();
        const double inv_eps = 1.0 / eps_;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                kernel_[i * m + j] = std::exp((fa_[i] + ga_[j] - cost_(i, j)) * inv_eps);
            }
        }
    }

    void absorb() {
        export_potentials(fa_, ga_);
        std::fill(u_.begin(), u_.end(), 1.0);
        std::fill(v_.begin(), v_.end(), 1.0);
        rebuild();
    }

    // targets: v_j = 1 / (alpha * sum_i u_i K_ij); sources: u_i = 1 / (beta * sum_j K_ij v_j).
    bool scale(bool targets) {
        const std::size_t n = fa_.size();
        const std::size_t m = ga_.size();
        if (targets) {
            std::fill(sums_.begin(), sums_.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double ui = u_[i];
                const double* row = kernel_.data() + i * m;
                for (std::size_t j = 0; j < m; ++j) {
                    sums_[j] += ui * row[j];
                }
            }
            const double weight = 1.0 / static_cast<double>(n);
            for (std::size_t j = 0; j < m; ++j) {
                const double v = 1.0 / (weight * sums_[j]);
                if (!(sums_[j] > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
                    return false;
                }
                v_[j] = v;
            }
        } else {
            const double weight = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < n; ++i) {
                const double* row = kernel_.data() + i * m;
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    acc += row[j] * v_[j];
                }
                const double u = 1.0 / (weight * acc);
                if (!(acc > 0.0) || !(u > 0.0) || !std::isfinite(u)) {
                    return false;
                }
                u_[i] = u;
            }
        }
        return true;
    }

    void log_sweep() {
        std::vector<double> f;
        std::vector<double> g;
        export_potentials(f, g);
        if (!all_finite(f) || !all_finite(g)) {
            throw NumericalFailure("non-finite Sinkhorn potential", eps_);
        }
        const double log_a = -std::log(static_cast<double>(fa_.size()));
        const double log_b = -std::log(static_cast<double>(ga_.size()));
        std::vector<double> scratch;
        soft_min_update(cost_, f, log_a, eps_, true, g, scratch);
        soft_min_update(cost_, g, log_b, eps_, false, f, scratch);
        if (!all_finite(f) || !all_finite(g)) {
            throw NumericalFailure("non-finite Sinkhorn potential", eps_);
        }
        fa_ = std::move(f);
        ga_ = std::move(g);
        std::fill(u_.begin(), u_.end(), 1.0);
        std::fill(v_.begin(), v_.end(), 1.0);
        rebuild();
    }

    const Matrix& cost_;
    double eps_;
    std::vector<double> fa_;
    std::vector<double> ga_;
    std::vector<double> u_;
    std::vector<double> v_;
    std::vector<double> kernel_;
    std::vector<double> sums_;
};

// Damped Newton ascent on the entropic dual at a fixed temperature. The last
// target potential is pinned to remove the constant shift between f and g.
bool newton_polish(const Matrix& cost, double eps, std::vector<double>& f, std::vector<double>& g) {
    constexpr int kMaxIterations = 30;
    constexpr double kMarginalTolerance = 1e-14;
    const auto n = static_cast<Eigen::Index>(f.size());
    const auto m = static_cast<Eigen::Index>(g.size());
    const double a = 1.0 / static_cast<double>(n);
    const double b = 1.0 / static_cast<double>(m);
    const double inv_eps = 1.0 / eps;
    Eigen::MatrixXd plan(n, m);

    auto evaluate = [&](const std::vector<double>& ff, const std::vector<double>& gg) {
        double mass = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto ui = static_cast<std::size_t>(i);
                const auto uj = static_cast<std::size_t>(j);
                plan(i, j) = a * b * std::exp((ff[ui] + gg[uj] - cost(ui, uj)) * inv_eps);
                mass += plan(i, j);
            }
        }
        double value = eps - eps * mass;
        for (double v : ff) {
            value += a * v;
        }
        for (double v : gg) {
            value += b * v;
        }
        return value;
    };

    auto marginal_error = [&]() {
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            err = std::max(err, std::abs(a - plan.row(i).sum()));
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            err = std::max(err, std::abs(b - plan.col(j).sum()));
        }
        return err;
    };

    double value = evaluate(f, g);
    double err = marginal_error();
    const Eigen::Index dim = n + m - 1;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd grad(dim);
    std::vector<double> f_try(f.size());
    std::vector<double> g_try(g.size());

    // Near the optimum the dual value stalls in rounding, so a step that
    // halves the marginal error is accepted as well.
    auto line_search = [&](const Eigen::VectorXd& step, double slope) {
        double t = 1.0;
        for (int back = 0; back < 40; ++back, t *= 0.5) {
            for (Eigen::Index i = 0; i < n; ++i) {
                f_try[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] + t * step(i);
            }
            for (Eigen::Index j = 0; j < m; ++j) {
                g_try[static_cast<std::size_t>(j)] = g[static_cast<std::size_t>(j)] + (j < m - 1 ? t * step(n + j) : 0.0);
            }
            const double trial = evaluate(f_try, g_try);
            if (!std::isfinite(trial)) {
                continue;
            }
            const double trial_err = marginal_error();
            if (trial >= value + 1e-4 * t * slope || trial_err <= 0.5 * err) {
                value = trial;
                err = trial_err;
                return true;
            }
        }
        return false;
    };
    for (int it = 0; it < kMaxIterations; ++it) {
        if (!std::isfinite(value)) {
            return false;
        }
        if (err < kMarginalTolerance) {
            return true;
        }
        const Eigen::VectorXd rows = plan.rowwise().sum();
        const Eigen::VectorXd cols = plan.colwise().sum().transpose();
        grad.head(n) = Eigen::VectorXd::Constant(n, a) - rows;
        grad.tail(m - 1) = Eigen::VectorXd::Constant(m - 1, b) - cols.head(m - 1);
        hess.setZero();
        hess.topLeftCorner(n, n).diagonal() = rows;
        hess.topRightCorner(n, m - 1) = plan.leftCols(m - 1);
        hess.bottomLeftCorner(m - 1, n) = plan.leftCols(m - 1).transpose();
        hess.bottomRightCorner(m - 1, m - 1).diagonal() = cols.head(m - 1);
        // Plans with nearly empty rows make the Hessian close to singular, so
        // the solve is retried with growing diagonal damping.
        const double scale = hess.diagonal().maxCoeff();
        bool accepted = false;
        for (double damping : {0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6}) {
            Eigen::MatrixXd damped = hess;
            damped.diagonal().array() += damping * scale;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() != Eigen::Success) {
                continue;
            }
            const Eigen::VectorXd step = ldlt.solve(eps * grad);
            const double slope = grad.dot(step);
            if (!step.allFinite() || !(slope > 0.0)) {
                continue;
            }
            accepted = line_search(step, slope);
            if (accepted) {
                break;
            }
        }
        if (!accepted) {
            return false;
        }
        f.swap(f_try);
        g.swap(g_try);
    }
    return err < kMarginalTolerance;
}

void run_temperatures(const Matrix& cost, std::span<const double> temperatures, const AnnealingSchedule& schedule,
                      SinkhornState& state) {
    std::vector<double> g_prev;
    std::vector<double> g_now;

    for (std::size_t t = 0; t < temperatures.size(); ++t) {
        const double eps = temperatures[t];
        const bool last = t + 1 == temperatures.size();
        const std::size_t sweeps = last ? schedule.max_final_iterations : schedule.inner_iterations;
        std::optional<ScaledSweeps> solver;
        solver.emplace(cost, eps, state.f, state.g);
        g_prev = state.g;
        for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
            // Newton is attempted after newton_after sweeps and again each time
            // that count doubles.
            if (last && schedule.newton_after > 0 && sweep >= schedule.newton_after &&
                sweep % schedule.newton_after == 0 && std::has_single_bit(sweep / schedule.newton_after)) {
                solver->export_potentials(state.f, state.g);
                newton_polish(cost, eps, state.f, state.g);
                solver.emplace(cost, eps, state.f, state.g);
            }
            solver->sweep();
            ++state.iterations;
            if (last) {
                solver->target_potential(g_now);
                if (!all_finite(g_now)) {
                    throw NumericalFailure("non-finite Sinkhorn potential", eps);
                }
                double change = 0.0;
                for (std::size_t j = 0; j < g_now.size(); ++j) {
                    change = std::max(change, std::abs(g_now[j] - g_prev[j]));
                }
                std::swap(g_prev, g_now);
                if (change < schedule.tolerance) {
                    state.converged = true;
                    break;
                }
            }
        }
        solver->export_potentials(state.f, state.g);
        if (!all_finite(state.f) || !all_finite(state.g)) {
            throw NumericalFailure("non-finite Sinkhorn potential", eps);
        }
    }
}

TransportResult finish(const Matrix& cost, SinkhornState&& state, double eps) {
    const std::size_t n = cost.rows();
    const std::size_t m = cost.cols();
    const double a = 1.0 / static_cast<double>(n);
    const double b = 1.0 / static_cast<double>(m);

    TransportResult out;
    out.plan = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out.plan(i, j) = a * b * std::exp((state.f[i] + state.g[j] - cost(i, j)) / eps);
        }
    }
    double dist = 0.0;
    for (double v : state.f) {
        dist += a * v;
    }
    for (double v : state.g) {
        dist += b * v;
    }
    out.f = std::move(state.f);
    out.g = std::move(state.g);
    out.distance = dist;
    out.epsilon_final = eps;
    out.iterations = state.iterations;
    out.converged = state.converged;
    return out;
}

}  // namespace

TransportResult sinkhorn_log(const ParticleSet& x, const ParticleSet& y, const AnnealingSchedule& schedule) {
    schedule.validate();
    const Matrix cost = cost_matrix(x, y);
    SinkhornState state{std::vector<double>(x.size(), 0.0), std::vector<double>(y.size(), 0.0)};
    run_temperatures(cost, schedule.temperatures, schedule, state);
    return finish(cost, std::move(state), schedule.final_temperature());
}

TransportResult sinkhorn_log(const ParticleSet& x, const ParticleSet& y, const AnnealingSchedule& schedule,
                             const TransportResult& warm) {
    schedule.validate();
    const double eps = schedule.final_temperature();
    if (warm.f.size() != x.size() || warm.g.size() != y.size() || warm.epsilon_final != eps) {
        return sinkhorn_log(x, y, schedule);
    }
    const Matrix cost = cost_matrix(x, y);
    SinkhornState state{warm.f, warm.g};
    const double only_final[] = {eps};
    run_temperatures(cost, only_final, schedule, state);
    return finish(cost, std::move(state), eps);
}

double exact_w2_1d(const ParticleSet& x, const ParticleSet& y) {
    if (x.size() != y.size()) {
        throw SizeMismatchError(x.size(), y.size());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

std::vector<double> sinkhorn_gradient_source(const TransportResult& result, const ParticleSet& x,
                                             const ParticleSet& y) {
    if (result.plan.rows() != x.size() || result.plan.cols() != y.size()) {
        throw SizeMismatchError(result.plan.rows() * result.plan.cols(), x.size() * y.size());
    }
    std::vector<double> grad(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            acc += result.plan(i, j) * 2.0 * (x[i] - y[j]);
        }
        grad[i] = acc;
    }
    return grad;
}

}  // namespace ssdrl::transport
