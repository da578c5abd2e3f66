// ssdrl: runs the regression, ablation, policy-evaluation and control experiments.
//
// Exit status: 0 on success, 2 for usage or configuration errors, 1 when a
// trial fails numerically.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ssdrl/errors.hpp"
#include "ssdrl/experiments.hpp"

namespace {

constexpr const char* kOutDirEnv = "SSDRL_OUT_DIR";

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    bool verbose = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "base seed; trial k uses seed + k");
    sub->add_option("--trials", o.trials, "number of independent trials")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, std::string("output directory (overrides ") + kOutDirEnv + ")");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", o.verbose, "report each finished trial on stderr");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ssdrl;
    using harness::ExperimentKind;

    CLI::App app{"Particle-based distributional RL experiments"};
    app.require_subcommand(1);
    Overrides o;
    const std::pair<const char*, const char*> commands[] = {
        {"regress", "WGF vs quantile regression on the Gaussian mixture"},
        {"ablate", "minimum temperature x step size grid for the WGF fit"},
        {"evaluate", "policy evaluation on CliffWalk against Monte Carlo returns"},
        {"control", "online fitted Q-iteration on the modified CliffWalk"},
        {"compare-policies", "SSD, e-greedy and CVaR behavior policies on the modified CliffWalk"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help), o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto kind = harness::parse_kind(app.get_subcommands().front()->get_name());
    harness::ExperimentConfig cfg;
    try {
        cfg = o.config.empty() ? harness::default_experiment(kind) : harness::load_experiment(o.config, kind);
        if (cfg.kind != kind) {
            throw ConfigError("config describes '" + harness::to_string(cfg.kind) + "', not '" +
                              harness::to_string(kind) + "'");
        }
        if (o.seed) {
            cfg.seed = *o.seed;
        }
        if (o.trials) {
            cfg.trials = *o.trials;
        }
        if (o.threads) {
            cfg.threads = *o.threads;
        }
        if (o.out) {
            cfg.output_dir = *o.out;
        } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
            cfg.output_dir = env;
        }
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "ssdrl: " << e.what() << '\n';
        return 2;
    }

    try {
        harness::RunOptions options;
        options.log = o.verbose ? &std::cerr : nullptr;
        const auto result = harness::run_experiment(cfg, options);
        std::cout << "wrote " << result.files.size() << " files to " << cfg.output_dir.string() << '\n';
    } catch (const ConfigError& e) {
        std::cerr << "ssdrl: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ssdrl: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
