#pragma once

#include "risopt/agents/agent.hpp"
#include "risopt/agents/networks.hpp"

namespace risopt {

// Deterministic policy gradient with a tanh actor and a single critic.
class DdpgAgent final : public Agent {
  public:
    DdpgAgent(Eigen::Index observation_dim, Eigen::Index action_dim, const AgentHyperparams& hp,
              std::uint64_t seed);

    std::string name() const override { return "ddpg"; }
    Eigen::Index observation_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return act_dim_; }

    Eigen::VectorXd select_action(const Eigen::VectorXd& observation, bool explore) override;
    UpdateDiagnostics update(const TransitionBatch& batch) override;

    nn::TensorMap export_state() const override;
    void import_state(const nn::TensorMap& tensors) override;

    Eigen::RowVectorXd critic_values(const Eigen::MatrixXd& states,
                                     const Eigen::MatrixXd& actions) const;
    // Mean critic value of the current policy at the given states, negated;
    // this is the quantity the actor step descends.
    double actor_objective(const Eigen::MatrixXd& states) const;
    nn::ParameterSet actor_gradient(const Eigen::MatrixXd& states) const;

    agents::Network& actor() { return actor_; }
    agents::Network& critic() { return critic_; }
    nn::ParameterSet& actor_target() { return actor_target_; }
    nn::ParameterSet& critic_target() { return critic_target_; }

  private:
    Eigen::Index obs_dim_;
    Eigen::Index act_dim_;
    AgentHyperparams hp_;
    agents::Network actor_;
    agents::Network critic_;
    nn::ParameterSet actor_target_;
    nn::ParameterSet critic_target_;
    std::uint64_t update_count_ = 0;
    Rng rng_;
};

}  // namespace risopt
