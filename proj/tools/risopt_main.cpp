#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "risopt/checks.hpp"
#include "risopt/config.hpp"
#include "risopt/harness.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    int episodes = -1;
};

void add_common(CLI::App* cmd, CommonOptions* opts, bool needs_output) {
    cmd->add_option("-c,--config", opts->config_path, "experiment config (JSON)");
    if (needs_output) {
        cmd->add_option("-o,--out", opts->out_dir, "output directory");
    }
    cmd->add_option("-s,--seed", opts->seed, "run a single seed instead of the config list");
    cmd->add_option("-e,--episodes", opts->episodes, "override the episode budget");
}

risopt::ExperimentConfig load_config(const CommonOptions& opts, const std::string& experiment) {
    risopt::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = risopt::ExperimentConfig::load(opts.config_path);
    }
    cfg.experiment = experiment;
    if (opts.seed >= 0) {
        cfg.seeds = {static_cast<std::uint64_t>(opts.seed)};
    }
    if (opts.episodes >= 0) {
        cfg.episodes = opts.episodes;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-RIS uplink simulator and policy-optimization harness"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    CLI::App* train = app.add_subcommand("train", "train one agent and record learning curves");
    add_common(train, &train_opts, true);
    std::string agent_override;
    train->add_option("-a,--agent", agent_override, "agent: sac | ddpg | td3 | random");

    CommonOptions sweep_opts;
    CLI::App* sweep = app.add_subcommand(
        "antenna-sweep", "min-rate of optimal vs random receive beamforming per antenna count");
    add_common(sweep, &sweep_opts, true);

    CommonOptions lr_opts;
    CLI::App* lr = app.add_subcommand("lr-study",
                                      "learning curves per agent and learning rate");
    add_common(lr, &lr_opts, true);

    CommonOptions scale_opts;
    CLI::App* scale = app.add_subcommand("scale-study",
                                         "convergence speed across problem sizes");
    add_common(scale, &scale_opts, true);

    CommonOptions verify_opts;
    CLI::App* verify = app.add_subcommand("verify", "run the built-in oracle checks");
    verify->add_option("-s,--seed", verify_opts.seed, "base seed for the checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed()) {
            risopt::ExperimentConfig cfg = load_config(train_opts, "train");
            if (!agent_override.empty()) {
                cfg.agent = agent_override;
                cfg.validate();
            }
            risopt::emit_train(cfg, train_opts.out_dir);
        } else if (sweep->parsed()) {
            risopt::emit_antenna_sweep(load_config(sweep_opts, "antenna_sweep"),
                                       sweep_opts.out_dir);
        } else if (lr->parsed()) {
            risopt::emit_lr_study(load_config(lr_opts, "lr_study"), lr_opts.out_dir);
        } else if (scale->parsed()) {
            risopt::emit_scale_study(load_config(scale_opts, "scale_study"),
                                     scale_opts.out_dir);
        } else if (verify->parsed()) {
            const std::uint64_t seed =
                verify_opts.seed >= 0 ? static_cast<std::uint64_t>(verify_opts.seed) : 7;
            bool all_passed = true;
            for (const risopt::CheckResult& check : risopt::run_verification(seed)) {
                std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name << "  ("
                          << check.detail << ")  [" << check.seconds << " s]\n";
                all_passed = all_passed && check.passed;
            }
            if (!all_passed) {
                return 1;
            }
        }
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
