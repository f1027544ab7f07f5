#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risopt/agents/agent.hpp"
#include "risopt/environment.hpp"

namespace risopt {

struct ScaleCase {
    int num_users = 4;
    int elements_per_ris = 10;
};

// One experiment definition: scenario physics, agent selection and
// hyperparameters, and the sweep axes of the study subcommands.
struct ExperimentConfig {
    std::string experiment = "train";  // train | antenna_sweep | lr_study | scale_study
    std::string agent = "sac";         // sac | ddpg | td3 | random
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int episodes = 300;
    int warmup_episodes = 1;
    std::size_t buffer_capacity = 100000;

    ScenarioParams scenario;
    EpisodeConfig episode;
    AgentHyperparams hyperparams;

    std::vector<int> antenna_counts = {4, 8, 12, 16};
    std::vector<double> learning_rates = {1e-2, 1e-3, 1e-4};
    std::vector<std::string> study_agents = {"sac", "ddpg", "td3"};

    std::vector<ScaleCase> scale_cases = {{4, 10}, {6, 20}, {8, 100}};
    double scale_learning_rate = 0.5e-2;
    int scale_episodes = 200;
    int action_dim_warning_cap = 1000;

    bool early_stop = false;
    int early_stop_window = 50;
    double early_stop_tolerance = 0.02;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);

    // Canonical serialization (every field, sorted keys); equal configs hash
    // equal and any field change changes the hash.
    std::string canonical_json() const;
    std::string hash() const;  // SHA-256 hex of canonical_json()

    void validate() const;
};

double dbm_to_watts(double dbm);

}  // namespace risopt
