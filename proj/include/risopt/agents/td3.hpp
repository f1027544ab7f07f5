#pragma once

#include "risopt/agents/agent.hpp"
#include "risopt/agents/networks.hpp"

namespace risopt {

// Twin-delayed deterministic policy gradient: clipped-noise target actions,
// minimum of two target critics, delayed actor and target refresh.
class Td3Agent final : public Agent {
  public:
    Td3Agent(Eigen::Index observation_dim, Eigen::Index action_dim, const AgentHyperparams& hp,
             std::uint64_t seed);

    std::string name() const override { return "td3"; }
    Eigen::Index observation_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return act_dim_; }

    Eigen::VectorXd select_action(const Eigen::VectorXd& observation, bool explore) override;
    UpdateDiagnostics update(const TransitionBatch& batch) override;
    // update() numbers calls 1, 2, ...; the actor and targets move only when
    // update_index is a multiple of the policy delay.
    UpdateDiagnostics update_at(const TransitionBatch& batch, std::uint64_t update_index);

    nn::TensorMap export_state() const override;
    void import_state(const nn::TensorMap& tensors) override;

    agents::Network& actor() { return actor_; }
    agents::Network& critic1() { return critic1_; }
    agents::Network& critic2() { return critic2_; }
    nn::ParameterSet& actor_target() { return actor_target_; }
    nn::ParameterSet& critic1_target() { return critic1_target_; }
    nn::ParameterSet& critic2_target() { return critic2_target_; }

  private:
    Eigen::Index obs_dim_;
    Eigen::Index act_dim_;
    AgentHyperparams hp_;
    agents::Network actor_;
    agents::Network critic1_;
    agents::Network critic2_;
    nn::ParameterSet actor_target_;
    nn::ParameterSet critic1_target_;
    nn::ParameterSet critic2_target_;
    std::uint64_t update_count_ = 0;
    Rng rng_;
};

}  // namespace risopt
