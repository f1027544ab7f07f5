#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "risopt/nn/checkpoint.hpp"
#include "risopt/replay_buffer.hpp"

namespace risopt {

struct AgentHyperparams {
    double learning_rate = 1e-2;
    double gamma = 0.99;
    double tau = 1e-3;
    Eigen::Index batch_size = 128;
    std::vector<int> hidden_sizes = {128, 128};

    // SAC. Auto-tuning keeps the entropy bonus proportionate to the critic
    // scale; with high-dimensional actions a fixed coefficient of this size
    // can swamp the reward signal outright.
    double entropy_coefficient = 0.2;
    bool auto_entropy = true;

    // DDPG / TD3
    double exploration_noise_std = 0.1;

    // TD3
    int policy_delay = 2;
    double target_noise_std = 0.2;
    double target_noise_clip = 0.5;

    void validate(std::size_t buffer_capacity) const;
};

struct UpdateDiagnostics {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double entropy = 0.0;
    double entropy_coefficient = 0.0;
    bool actor_updated = false;
    Eigen::RowVectorXd targets;  // critic regression targets for the batch
};

class Agent {
  public:
    virtual ~Agent() = default;

    virtual std::string name() const = 0;
    virtual Eigen::Index observation_dim() const = 0;
    virtual Eigen::Index action_dim() const = 0;

    // Entries are always within [-1, 1]. `explore` adds the algorithm's
    // sampling or exploration noise; otherwise the action is deterministic.
    virtual Eigen::VectorXd select_action(const Eigen::VectorXd& observation, bool explore) = 0;

    virtual UpdateDiagnostics update(const TransitionBatch& batch) = 0;

    virtual nn::TensorMap export_state() const = 0;
    virtual void import_state(const nn::TensorMap& tensors) = 0;

    void save(const std::string& path) const;
    void load(const std::string& path);
};

// kind is one of "sac", "ddpg", "td3" (case-insensitive).
std::unique_ptr<Agent> make_agent(const std::string& kind, Eigen::Index observation_dim,
                                  Eigen::Index action_dim, const AgentHyperparams& hp,
                                  std::uint64_t seed);

}  // namespace risopt
