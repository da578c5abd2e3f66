#include "ssdrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "ssdrl/env_config.hpp"
#include "ssdrl/errors.hpp"
#include "ssdrl/stats.hpp"
#include "ssdrl/svg.hpp"

namespace ssdrl::harness {

namespace {

struct Moments {
    double first = 0.0;
    double second = 0.0;
};

Moments moments(std::span<const double> v) {
    Moments m;
    for (double x : v) {
        m.first += x;
        m.second += x * x;
    }
    m.first /= static_cast<double>(v.size());
    m.second /= static_cast<double>(v.size());
    return m;
}

double sq(double v) { return v * v; }

measures::ParticleSet fit(const measures::ParticleSet& init, const measures::ParticleSet& draws,
                          const RegressionSettings& s, const wgf::ProximalConfig& proximal,
                          learners::UpdateRule rule) {
    if (rule == learners::UpdateRule::QuantileRegression) {
        return learners::qr_fit(init, draws, s.qr_step_size, s.qr_sweeps);
    }
    learners::EvaluationConfig ec;
    ec.proximal = proximal;
    ec.particles = init.size();
    ec.gradient_steps = s.gradient_steps;
    return learners::wgf_fit(init, draws, ec).fitted;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

std::vector<double> column_values(const Table& t, const std::string& name) {
    const auto c = t.column(name);
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        out.push_back(r[c]);
    }
    return out;
}

// Mean curve of one raw column, with a CI band when there are several trials.
PlotSeries curve(const MethodResult& m, const std::string& x_col, const std::string& y_col, std::size_t trials) {
    PlotSeries s;
    s.name = m.name;
    s.x = column_values(m.aggregate, x_col + "_mean");
    s.mean = column_values(m.aggregate, y_col + "_mean");
    if (trials >= 2) {
        const auto hw = column_values(m.aggregate, y_col + "_half_width");
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            s.lower.push_back(s.mean[i] - hw[i]);
            s.upper.push_back(s.mean[i] + hw[i]);
        }
    }
    return s;
}

// Root of the mean squared error; the band is the root of the CI of the mean squared error.
PlotSeries rmse_curve(const MethodResult& m, const std::string& x_col, const std::string& sq_col,
                      std::size_t trials) {
    PlotSeries s = curve(m, x_col, sq_col, trials);
    for (auto& v : s.mean) {
        v = std::sqrt(v);
    }
    for (auto& v : s.lower) {
        v = std::sqrt(std::max(v, 0.0));
    }
    for (auto& v : s.upper) {
        v = std::sqrt(v);
    }
    return s;
}

struct Figure {
    std::string name;
    PlotStyle style;
    std::vector<PlotSeries> series;
};

std::vector<Figure> figures(const ExperimentConfig& cfg, const std::vector<MethodResult>& methods) {
    std::vector<Figure> out;
    const auto trials = cfg.trials;
    auto per_method = [&](const std::string& name, PlotStyle style, const std::string& x, const std::string& y) {
        Figure f{name, std::move(style), {}};
        for (const auto& m : methods) {
            f.series.push_back(curve(m, x, y, trials));
        }
        out.push_back(std::move(f));
    };
    switch (cfg.kind) {
        case ExperimentKind::Control:
        case ExperimentKind::ComparePolicies:
            per_method("return", {"Episodic return", "episode", "return"}, "episode", "return");
            per_method("steps", {"Episodic step count", "episode", "steps"}, "episode", "steps");
            per_method("cliff_falls", {"Cliff falls per episode", "episode", "falls"}, "episode", "cliff_falls");
            per_method("multi_solution_events", {"Multiple-solution events per episode", "episode", "events"},
                       "episode", "multi_solution_events");
            per_method("top_path", {"Share of top-path episodes", "episode", "fraction"}, "episode", "top_path");
            per_method("greedy_return", {"Greedy-policy return", "episode", "return"}, "episode", "greedy_return");
            break;
        case ExperimentKind::Evaluate:
            per_method("loss", {"Proximal loss", "gradient step", "loss"}, "step", "loss");
            per_method("value_error", {"Squared value error", "gradient step", "error"}, "step", "value_error");
            break;
        case ExperimentKind::Regress:
            for (const char* moment : {"first", "second"}) {
                Figure f{std::string(moment) + "_moment_rmse",
                         {std::string("RMSE of the ") + moment + " moment", "sample count", "RMSE"},
                         {}};
                for (const auto& m : methods) {
                    f.series.push_back(rmse_curve(m, "sample_count", std::string(moment) + "_sq_error", trials));
                }
                out.push_back(std::move(f));
            }
            break;
        case ExperimentKind::Ablate: {
            const auto& m = methods.front();
            for (const char* moment : {"first", "second"}) {
                Figure f{std::string("ablation_") + moment + "_moment",
                         {std::string("RMSE of the ") + moment + " moment by step size h", "minimum temperature",
                          "RMSE"},
                         {}};
                const auto temps = column_values(m.aggregate, "min_temperature_mean");
                const auto hs = column_values(m.aggregate, "h_mean");
                const auto err = column_values(m.aggregate, std::string(moment) + "_sq_error_mean");
                for (double h : cfg.ablation.h_values) {
                    PlotSeries s;
                    s.name = "h=" + format_number(h);
                    for (std::size_t i = 0; i < temps.size(); ++i) {
                        if (hs[i] == h) {
                            s.x.push_back(temps[i]);
                            s.mean.push_back(std::sqrt(err[i]));
                        }
                    }
                    f.series.push_back(std::move(s));
                }
                out.push_back(std::move(f));
            }
            break;
        }
    }
    return out;
}

}  // namespace

const std::vector<std::string>& control_columns() {
    static const std::vector<std::string> c{"episode",      "return",      "steps",
                                            "cliff_falls",  "multi_solution_events",
                                            "top_path",     "reached_goal", "greedy_return",
                                            "greedy_steps"};
    return c;
}

const std::vector<std::string>& evaluation_columns() {
    static const std::vector<std::string> c{"step", "loss", "value_error", "fitted_mean", "target_mean"};
    return c;
}

const std::vector<std::string>& regression_columns() {
    static const std::vector<std::string> c{"sample_count",  "first_moment",  "second_moment",
                                            "reference_first_moment", "reference_second_moment",
                                            "first_sq_error", "second_sq_error"};
    return c;
}

const std::vector<std::string>& ablation_columns() {
    static const std::vector<std::string> c{"min_temperature",        "h",
                                            "first_moment",           "second_moment",
                                            "reference_first_moment", "reference_second_moment",
                                            "first_sq_error",         "second_sq_error"};
    return c;
}

Table control_trial(const envs::GridWorld& env, const MethodSpec& method, std::uint64_t seed) {
    auto cfg = method.learner;
    cfg.seed = seed;
    const auto result = learners::fitted_q_iteration(env, cfg, method.rule);
    Table t{control_columns(), {}};
    for (const auto& e : result.episodes) {
        t.add_row({static_cast<double>(e.episode), e.episode_return, static_cast<double>(e.steps),
                   static_cast<double>(e.cliff_falls), static_cast<double>(e.multi_solution_events),
                   e.top_path ? 1.0 : 0.0, e.reached_goal ? 1.0 : 0.0, e.greedy_return,
                   static_cast<double>(e.greedy_steps)});
    }
    return t;
}

Table evaluation_trial(const envs::GridWorld& env, const EvaluationSettings& settings, std::uint64_t seed) {
    auto qc = settings.q_learning;
    qc.seed += seed;
    const auto q = learners::q_learning(env, qc);
    const int state = settings.state ? env.index(*settings.state) : env.start_state();
    envs::Rng rng(seed);
    const auto targets =
        learners::monte_carlo_targets(env, q.policy, state, settings.rollouts, settings.depth, env.gamma(), rng);
    const auto trace = learners::wgf_policy_evaluation(targets, settings.fit, rng);
    Table t{evaluation_columns(), {}};
    for (std::size_t k = 0; k < trace.losses.size(); ++k) {
        t.add_row({static_cast<double>(k), trace.losses[k], trace.value_errors[k], trace.means[k], trace.target_mean});
    }
    return t;
}

Table regression_trial(const envs::GmmSpec& source, const RegressionSettings& settings, learners::UpdateRule rule,
                       std::uint64_t seed) {
    envs::Rng rng(seed);
    const auto reference = moments(envs::sample_gmm(source, settings.reference_samples, rng));
    Table t{regression_columns(), {}};
    for (std::size_t n : settings.sample_counts) {
        const measures::ParticleSet draws(envs::sample_gmm(source, n, rng));
        const auto init = settings.init.sample(n, rng);
        const auto fitted = fit(init, draws, settings, settings.proximal, rule);
        const auto m = moments(fitted.values());
        t.add_row({static_cast<double>(n), m.first, m.second, reference.first, reference.second,
                   sq(m.first - reference.first), sq(m.second - reference.second)});
    }
    return t;
}

Table ablation_trial(const envs::GmmSpec& source, const RegressionSettings& settings, const AblationSettings& grid,
                     std::uint64_t seed) {
    envs::Rng rng(seed);
    const auto reference = moments(envs::sample_gmm(source, settings.reference_samples, rng));
    const measures::ParticleSet draws(envs::sample_gmm(source, grid.sample_count, rng));
    const auto init = settings.init.sample(grid.sample_count, rng);
    Table t{ablation_columns(), {}};
    for (double temp : grid.min_temperatures) {
        for (double h : grid.h_values) {
            auto proximal = settings.proximal;
            proximal.temperatures = wgf::ProximalConfig::temperature_ladder(temp);
            proximal.h = h;
            const auto fitted = fit(init, draws, settings, proximal, learners::UpdateRule::Wgf);
            const auto m = moments(fitted.values());
            t.add_row({temp, h, m.first, m.second, reference.first, reference.second, sq(m.first - reference.first),
                       sq(m.second - reference.second)});
        }
    }
    return t;
}

Table aggregate(const std::vector<Table>& trials) {
    if (trials.empty()) {
        throw DomainError("nothing to aggregate");
    }
    const auto& first = trials.front();
    Table out;
    for (const auto& c : first.columns) {
        out.columns.push_back(c + "_mean");
        out.columns.push_back(c + "_half_width");
    }
    for (const auto& t : trials) {
        if (t.columns != first.columns || t.rows.size() != first.rows.size()) {
            throw SizeMismatchError(t.rows.size(), first.rows.size());
        }
    }
    std::vector<double> samples(trials.size());
    for (std::size_t r = 0; r < first.rows.size(); ++r) {
        std::vector<double> row;
        row.reserve(out.columns.size());
        for (std::size_t c = 0; c < first.columns.size(); ++c) {
            for (std::size_t k = 0; k < trials.size(); ++k) {
                samples[k] = trials[k].rows[r][c];
            }
            if (samples.size() >= 2) {
                const auto ci = stats::confidence_interval(samples);
                row.push_back(ci.mean);
                row.push_back(ci.half_width);
            } else {
                row.push_back(samples.front());
                row.push_back(0.0);
            }
        }
        out.add_row(std::move(row));
    }
    return out;
}

const MethodResult& ExperimentResult::method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.name == name) {
            return m;
        }
    }
    throw ConfigError("no method named '" + name + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const auto env_node = envs::resolve_environment(cfg.environment);

    std::vector<std::string> names;
    std::function<Table(std::size_t, std::uint64_t)> run_one;
    std::optional<envs::GridWorld> grid;
    std::optional<envs::GmmSpec> gmm;

    switch (cfg.kind) {
        case ExperimentKind::Control:
        case ExperimentKind::ComparePolicies:
            grid.emplace(envs::parse_grid_spec(env_node));
            for (const auto& m : cfg.methods) {
                names.push_back(m.name);
            }
            run_one = [&](std::size_t method, std::uint64_t seed) {
                return control_trial(*grid, cfg.methods[method], seed);
            };
            break;
        case ExperimentKind::Evaluate:
            grid.emplace(envs::parse_grid_spec(env_node));
            names = {"wgf"};
            run_one = [&](std::size_t, std::uint64_t seed) { return evaluation_trial(*grid, cfg.evaluation, seed); };
            break;
        case ExperimentKind::Regress:
            gmm = envs::parse_gmm_spec(env_node);
            names = {"wgf", "qr"};
            run_one = [&](std::size_t method, std::uint64_t seed) {
                return regression_trial(*gmm, cfg.regression,
                                        method == 0 ? learners::UpdateRule::Wgf
                                                    : learners::UpdateRule::QuantileRegression,
                                        seed);
            };
            break;
        case ExperimentKind::Ablate:
            gmm = envs::parse_gmm_spec(env_node);
            names = {"wgf"};
            run_one = [&](std::size_t, std::uint64_t seed) {
                return ablation_trial(*gmm, cfg.regression, cfg.ablation, seed);
            };
            break;
    }

    const std::size_t tasks = names.size() * cfg.trials;
    std::vector<Table> tables(tasks);
    std::vector<std::exception_ptr> errors(tasks);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks; i = next++) {
            const std::size_t method = i / cfg.trials;
            const std::size_t trial = i % cfg.trials;
            try {
                tables[i] = run_one(method, cfg.seed + trial);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            if (options.log) {
                std::lock_guard lock(log_mutex);
                *options.log << names[method] << " trial " << trial << (errors[i] ? " failed" : " done") << '\n';
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t n = std::min(cfg.threads, tasks);
        for (std::size_t k = 1; k < n; ++k) {
            pool.emplace_back(worker);
        }
        worker();
    }
    for (std::size_t i = 0; i < tasks; ++i) {
        if (errors[i]) {
            const std::size_t method = i / cfg.trials;
            const std::size_t trial = i % cfg.trials;
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw TrialFailure(names[method], trial, cfg.seed + trial, e.what());
            }
        }
    }

    ExperimentResult result;
    for (std::size_t m = 0; m < names.size(); ++m) {
        MethodResult mr;
        mr.name = names[m];
        mr.trials.assign(std::make_move_iterator(tables.begin() + static_cast<std::ptrdiff_t>(m * cfg.trials)),
                         std::make_move_iterator(tables.begin() + static_cast<std::ptrdiff_t>((m + 1) * cfg.trials)));
        mr.aggregate = aggregate(mr.trials);
        result.methods.push_back(std::move(mr));
    }

    if (options.write_outputs) {
        std::filesystem::create_directories(cfg.output_dir);
        for (const auto& m : result.methods) {
            for (std::size_t t = 0; t < m.trials.size(); ++t) {
                const auto path = cfg.output_dir / ("raw_" + m.name + "_" + std::to_string(t) + ".csv");
                write_csv(path, m.trials[t]);
                result.files.push_back(path);
            }
            const auto path = cfg.output_dir / ("agg_" + m.name + ".csv");
            write_csv(path, m.aggregate);
            result.files.push_back(path);
        }
        for (const auto& f : figures(cfg, result.methods)) {
            const auto path = cfg.output_dir / ("fig_" + f.name + ".svg");
            write_text(path, emit_svg(f.series, f.style));
            result.files.push_back(path);
        }
    }
    return result;
}

}  // namespace ssdrl::harness
