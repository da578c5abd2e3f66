#include "ssdrl/experiment_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <set>
#include <thread>

#include "ssdrl/env_config.hpp"
#include "ssdrl/errors.hpp"

namespace ssdrl::harness {

using nlohmann::json;

namespace {

void check_keys(const json& node, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!node.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, _] : node.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get(const json& node, const char* key, const std::string& where) {
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

template <typename T>
void read(const json& node, const char* key, T& out, const std::string& where) {
    if (node.contains(key)) {
        out = get<T>(node, key, where);
    }
}

std::size_t read_count(const json& node, const char* key, std::size_t fallback, const std::string& where) {
    if (!node.contains(key)) {
        return fallback;
    }
    const auto& v = node.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

learners::UpdateRule parse_rule(const std::string& name) {
    if (name == "wgf") {
        return learners::UpdateRule::Wgf;
    }
    if (name == "qr") {
        return learners::UpdateRule::QuantileRegression;
    }
    throw ConfigError("unknown update rule '" + name + "' (expected wgf or qr)");
}

MethodSpec method(std::string name, learners::UpdateRule rule, const learners::LearnerConfig& base,
                  const std::string& policy) {
    MethodSpec m{std::move(name), rule, base};
    const auto tol = base.policy.value_tie_tolerance;
    const auto slack = base.policy.dominance_slack;
    m.learner.policy = policies::PolicyConfig::parse(policy);
    m.learner.policy.value_tie_tolerance = tol;
    m.learner.policy.dominance_slack = slack;
    return m;
}

bool needs_gridworld(ExperimentKind k) {
    return k == ExperimentKind::Evaluate || k == ExperimentKind::Control || k == ExperimentKind::ComparePolicies;
}

bool is_filename_safe(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Regress: return "regress";
        case ExperimentKind::Ablate: return "ablate";
        case ExperimentKind::Evaluate: return "evaluate";
        case ExperimentKind::Control: return "control";
        case ExperimentKind::ComparePolicies: return "compare-policies";
    }
    return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
    for (auto k : {ExperimentKind::Regress, ExperimentKind::Ablate, ExperimentKind::Evaluate, ExperimentKind::Control,
                   ExperimentKind::ComparePolicies}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig default_experiment(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    cfg.output_dir = "results/" + to_string(kind);
    switch (kind) {
        case ExperimentKind::Regress:
            cfg.environment = "gmm-paper";
            cfg.trials = 100;
            break;
        case ExperimentKind::Ablate:
            cfg.environment = "gmm-paper";
            cfg.trials = 50;
            break;
        case ExperimentKind::Evaluate:
            cfg.environment = "cliffwalk-standard";
            cfg.trials = 5;
            break;
        case ExperimentKind::Control: {
            cfg.environment = "cliffwalk-modified";
            cfg.trials = 50;
            const auto base = learners::LearnerConfig{};
            for (auto rule : {learners::UpdateRule::Wgf, learners::UpdateRule::QuantileRegression}) {
                const std::string prefix = rule == learners::UpdateRule::Wgf ? "wgf" : "qr";
                cfg.methods.push_back(method(prefix + "-ssd", rule, base, "ssd"));
                cfg.methods.push_back(method(prefix + "-egreedy", rule, base, "egreedy"));
            }
            break;
        }
        case ExperimentKind::ComparePolicies: {
            cfg.environment = "cliffwalk-modified";
            cfg.trials = 50;
            const auto base = learners::LearnerConfig{};
            const auto wgf = learners::UpdateRule::Wgf;
            cfg.methods.push_back(method("ssd", wgf, base, "ssd"));
            cfg.methods.push_back(method("egreedy", wgf, base, "egreedy"));
            cfg.methods.push_back(method("cvar-0.05", wgf, base, "cvar@0.05"));
            cfg.methods.push_back(method("cvar-0.25", wgf, base, "cvar@0.25"));
            cfg.methods.push_back(method("cvar-0.45", wgf, base, "cvar@0.45"));
            break;
        }
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (trials == 0) {
        throw ConfigError("trials must be at least 1");
    }
    if (threads == 0) {
        throw ConfigError("threads must be at least 1");
    }
    const auto env = envs::resolve_environment(environment);
    if (needs_gridworld(kind)) {
        envs::parse_grid_spec(env).validate();
    } else {
        envs::parse_gmm_spec(env).validate();
    }
    if (kind == ExperimentKind::Control || kind == ExperimentKind::ComparePolicies) {
        if (methods.empty()) {
            throw ConfigError("a control experiment needs at least one method");
        }
        std::set<std::string> names;
        for (const auto& m : methods) {
            if (!is_filename_safe(m.name)) {
                throw ConfigError("method name '" + m.name + "' must be non-empty and use only [A-Za-z0-9._-]");
            }
            if (!names.insert(m.name).second) {
                throw ConfigError("duplicate method name '" + m.name + "'");
            }
            m.learner.validate();
        }
    }
    if (kind == ExperimentKind::Regress) {
        if (regression.sample_counts.empty() || regression.reference_samples == 0 || regression.gradient_steps == 0 ||
            regression.qr_sweeps == 0) {
            throw ConfigError("regression sample counts, reference size, gradient steps and sweeps must be positive");
        }
        if (std::find(regression.sample_counts.begin(), regression.sample_counts.end(), 0u) !=
            regression.sample_counts.end()) {
            throw ConfigError("regression sample counts must be positive");
        }
        if (!(regression.qr_step_size > 0.0)) {
            throw ConfigError("quantile-regression step size must be positive");
        }
        regression.proximal.validate();
        regression.init.validate();
    }
    if (kind == ExperimentKind::Ablate) {
        if (ablation.min_temperatures.empty() || ablation.h_values.empty() || ablation.sample_count == 0) {
            throw ConfigError("ablation grid and sample count must be non-empty");
        }
        for (double t : ablation.min_temperatures) {
            if (!(t > 0.0)) {
                throw ConfigError("ablation temperatures must be positive");
            }
        }
        for (double h : ablation.h_values) {
            if (!(h > 0.0)) {
                throw ConfigError("ablation step sizes h must be positive");
            }
        }
        regression.proximal.validate();
        regression.init.validate();
    }
    if (kind == ExperimentKind::Evaluate) {
        const auto& e = evaluation;
        if (e.rollouts == 0 || e.depth == 0 || e.fit.particles == 0 || e.fit.gradient_steps == 0 ||
            e.q_learning.episodes == 0) {
            throw ConfigError("evaluation rollouts, depth, particles, gradient steps and episodes must be positive");
        }
        e.fit.proximal.validate();
        e.fit.init.validate();
        if (e.state) {
            const auto grid = envs::parse_grid_spec(env);
            if (e.state->row < 0 || e.state->row >= grid.rows || e.state->col < 0 || e.state->col >= grid.cols) {
                throw ConfigError("evaluation state lies outside the grid");
            }
        }
    }
}

learners::InitSpec parse_init(const json& node) {
    const std::string where = "init";
    check_keys(node, {"type", "value", "mean", "std", "lo", "hi"}, where);
    const auto type = get<std::string>(node, "type", where);
    learners::InitSpec spec;
    if (type == "constant") {
        spec = learners::InitSpec::constant(get<double>(node, "value", where));
    } else if (type == "normal") {
        spec = learners::InitSpec::normal(node.contains("mean") ? get<double>(node, "mean", where) : 0.0,
                                          node.contains("std") ? get<double>(node, "std", where) : 1.0);
    } else if (type == "uniform") {
        spec = learners::InitSpec::uniform(get<double>(node, "lo", where), get<double>(node, "hi", where));
    } else {
        throw ConfigError("unknown init type '" + type + "'");
    }
    spec.validate();
    return spec;
}

wgf::ProximalConfig parse_proximal(const json& node, wgf::ProximalConfig base) {
    const std::string where = "proximal";
    check_keys(node,
               {"h", "temperatures", "min_temperature", "gradient_step_size", "max_gradient_steps", "loss_tolerance",
                "sinkhorn"},
               where);
    if (node.contains("temperatures") && node.contains("min_temperature")) {
        throw ConfigError("give either 'temperatures' or 'min_temperature', not both");
    }
    read(node, "h", base.h, where);
    read(node, "temperatures", base.temperatures, where);
    if (node.contains("min_temperature")) {
        base.temperatures = wgf::ProximalConfig::temperature_ladder(get<double>(node, "min_temperature", where));
    }
    read(node, "gradient_step_size", base.gradient_step_size, where);
    base.max_gradient_steps = read_count(node, "max_gradient_steps", base.max_gradient_steps, where);
    read(node, "loss_tolerance", base.loss_tolerance, where);
    if (node.contains("sinkhorn")) {
        const auto& s = node.at("sinkhorn");
        const std::string sw = "proximal.sinkhorn";
        check_keys(s, {"start", "ratio", "inner_iterations", "max_iterations", "tolerance", "newton_after"}, sw);
        read(s, "start", base.sinkhorn_start, sw);
        read(s, "ratio", base.sinkhorn_ratio, sw);
        base.sinkhorn_inner_iterations = read_count(s, "inner_iterations", base.sinkhorn_inner_iterations, sw);
        base.sinkhorn_max_iterations = read_count(s, "max_iterations", base.sinkhorn_max_iterations, sw);
        read(s, "tolerance", base.sinkhorn_tolerance, sw);
        base.sinkhorn_newton_after = read_count(s, "newton_after", base.sinkhorn_newton_after, sw);
    }
    base.validate();
    return base;
}

policies::PolicyConfig parse_policy(const json& node, const policies::PolicyConfig& base) {
    policies::PolicyConfig out;
    if (node.is_string()) {
        out = policies::PolicyConfig::parse(node.get<std::string>());
        out.explore = base.explore;
        out.value_tie_tolerance = base.value_tie_tolerance;
        out.dominance_slack = base.dominance_slack;
        return out;
    }
    const std::string where = "policy";
    check_keys(node, {"kind", "epsilon", "alpha", "explore", "value_tie_tolerance", "dominance_slack"}, where);
    out = base;
    if (node.contains("kind")) {
        out = policies::PolicyConfig::parse(get<std::string>(node, "kind", where));
        out.explore = base.explore;
        out.value_tie_tolerance = base.value_tie_tolerance;
        out.dominance_slack = base.dominance_slack;
    }
    read(node, "epsilon", out.epsilon, where);
    read(node, "alpha", out.alpha, where);
    read(node, "explore", out.explore, where);
    read(node, "value_tie_tolerance", out.value_tie_tolerance, where);
    read(node, "dominance_slack", out.dominance_slack, where);
    out.validate();
    return out;
}

namespace {

constexpr std::initializer_list<const char*> kLearnerKeys = {
    "episodes", "horizon", "particles", "init", "qr_step_size", "evaluate_greedy", "proximal", "policy"};

learners::LearnerConfig apply_learner_keys(const json& node, learners::LearnerConfig base, const std::string& where) {
    base.episodes = read_count(node, "episodes", base.episodes, where);
    base.horizon = read_count(node, "horizon", base.horizon, where);
    base.particles = read_count(node, "particles", base.particles, where);
    if (node.contains("init")) {
        base.init = parse_init(node.at("init"));
    }
    read(node, "qr_step_size", base.qr_step_size, where);
    read(node, "evaluate_greedy", base.evaluate_greedy, where);
    if (node.contains("proximal")) {
        base.proximal = parse_proximal(node.at("proximal"), base.proximal);
    }
    if (node.contains("policy")) {
        base.policy = parse_policy(node.at("policy"), base.policy);
    }
    return base;
}

}  // namespace

learners::LearnerConfig parse_learner(const json& node, learners::LearnerConfig base) {
    check_keys(node, kLearnerKeys, "learner");
    base = apply_learner_keys(node, std::move(base), "learner");
    base.validate();
    return base;
}

ExperimentConfig parse_experiment(const json& node, std::optional<ExperimentKind> fallback) {
    const std::string where = "experiment config";
    check_keys(node,
               {"experiment", "environment", "trials", "seed", "output_dir", "threads", "learner", "methods",
                "regression", "ablation", "evaluation"},
               where);
    std::optional<ExperimentKind> kind = fallback;
    if (node.contains("experiment")) {
        kind = parse_kind(get<std::string>(node, "experiment", where));
    }
    if (!kind) {
        throw ConfigError("config does not name an experiment");
    }
    ExperimentConfig cfg = default_experiment(*kind);

    if (node.contains("environment")) {
        cfg.environment = node.at("environment");
    }
    cfg.trials = read_count(node, "trials", cfg.trials, where);
    if (node.contains("seed")) {
        cfg.seed = read_count(node, "seed", 0, where);
    }
    if (node.contains("output_dir")) {
        cfg.output_dir = get<std::string>(node, "output_dir", where);
    }
    cfg.threads = read_count(node, "threads", cfg.threads, where);

    if (node.contains("learner")) {
        const auto& ln = node.at("learner");
        check_keys(ln, kLearnerKeys, "learner");
        for (auto& m : cfg.methods) {
            // The method's own policy kind survives a learner-level policy object without "kind".
            m.learner = apply_learner_keys(ln, m.learner, "learner");
        }
    }
    if (node.contains("methods")) {
        const auto& list = node.at("methods");
        if (!list.is_array()) {
            throw ConfigError("'methods' must be an array");
        }
        learners::LearnerConfig base = learners::LearnerConfig{};
        if (node.contains("learner")) {
            base = apply_learner_keys(node.at("learner"), base, "learner");
        }
        cfg.methods.clear();
        for (const auto& entry : list) {
            const std::string mw = "method";
            std::initializer_list<const char*> keys = {"name",      "update",       "episodes",        "horizon",
                                                       "particles", "init",         "qr_step_size",    "evaluate_greedy",
                                                       "proximal",  "policy"};
            check_keys(entry, keys, mw);
            MethodSpec m;
            m.rule = entry.contains("update") ? parse_rule(get<std::string>(entry, "update", mw))
                                              : learners::UpdateRule::Wgf;
            m.learner = apply_learner_keys(entry, base, mw);
            if (entry.contains("name")) {
                m.name = get<std::string>(entry, "name", mw);
            } else {
                m.name = (m.rule == learners::UpdateRule::Wgf ? "wgf-" : "qr-") + m.learner.policy.name();
                std::replace(m.name.begin(), m.name.end(), '@', '-');
            }
            cfg.methods.push_back(std::move(m));
        }
    }

    if (node.contains("regression")) {
        const auto& r = node.at("regression");
        const std::string rw = "regression";
        check_keys(r,
                   {"sample_counts", "reference_samples", "gradient_steps", "qr_sweeps", "qr_step_size", "proximal",
                    "init"},
                   rw);
        read(r, "sample_counts", cfg.regression.sample_counts, rw);
        cfg.regression.reference_samples = read_count(r, "reference_samples", cfg.regression.reference_samples, rw);
        cfg.regression.gradient_steps = read_count(r, "gradient_steps", cfg.regression.gradient_steps, rw);
        cfg.regression.qr_sweeps = read_count(r, "qr_sweeps", cfg.regression.qr_sweeps, rw);
        read(r, "qr_step_size", cfg.regression.qr_step_size, rw);
        if (r.contains("proximal")) {
            cfg.regression.proximal = parse_proximal(r.at("proximal"), cfg.regression.proximal);
        }
        if (r.contains("init")) {
            cfg.regression.init = parse_init(r.at("init"));
        }
    }
    if (node.contains("ablation")) {
        const auto& a = node.at("ablation");
        const std::string aw = "ablation";
        check_keys(a, {"min_temperatures", "h_values", "sample_count"}, aw);
        read(a, "min_temperatures", cfg.ablation.min_temperatures, aw);
        read(a, "h_values", cfg.ablation.h_values, aw);
        cfg.ablation.sample_count = read_count(a, "sample_count", cfg.ablation.sample_count, aw);
    }
    if (node.contains("evaluation")) {
        const auto& e = node.at("evaluation");
        const std::string ew = "evaluation";
        check_keys(e, {"q_learning", "rollouts", "depth", "particles", "gradient_steps", "init", "proximal", "state"},
                   ew);
        auto& ev = cfg.evaluation;
        if (e.contains("q_learning")) {
            const auto& q = e.at("q_learning");
            const std::string qw = "evaluation.q_learning";
            check_keys(q, {"episodes", "epsilon", "gamma", "learning_rate", "seed"}, qw);
            ev.q_learning.episodes = read_count(q, "episodes", ev.q_learning.episodes, qw);
            read(q, "epsilon", ev.q_learning.epsilon, qw);
            read(q, "gamma", ev.q_learning.gamma, qw);
            read(q, "learning_rate", ev.q_learning.learning_rate, qw);
            ev.q_learning.seed = read_count(q, "seed", ev.q_learning.seed, qw);
        }
        ev.rollouts = read_count(e, "rollouts", ev.rollouts, ew);
        ev.depth = read_count(e, "depth", ev.depth, ew);
        ev.fit.particles = read_count(e, "particles", ev.fit.particles, ew);
        ev.fit.gradient_steps = read_count(e, "gradient_steps", ev.fit.gradient_steps, ew);
        if (e.contains("init")) {
            ev.fit.init = parse_init(e.at("init"));
        }
        if (e.contains("proximal")) {
            ev.fit.proximal = parse_proximal(e.at("proximal"), ev.fit.proximal);
        }
        if (e.contains("state")) {
            const auto& s = e.at("state");
            if (!s.is_array() || s.size() != 2) {
                throw ConfigError("evaluation.state must be a [row, col] pair");
            }
            ev.state = envs::Cell{s.at(0).get<int>(), s.at(1).get<int>()};
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path, std::optional<ExperimentKind> fallback) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path.string() + "'");
    }
    json node;
    try {
        node = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_experiment(node, fallback);
}

}  // namespace ssdrl::harness
