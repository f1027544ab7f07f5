#pragma once

#include "risopt/agents/agent.hpp"
#include "risopt/agents/networks.hpp"
#include "risopt/nn/squashed_gaussian.hpp"

namespace risopt {

// Soft actor-critic with twin critics and a squashed-Gaussian policy. The
// actor network emits means stacked over log standard deviations.
class SacAgent final : public Agent {
  public:
    SacAgent(Eigen::Index observation_dim, Eigen::Index action_dim, const AgentHyperparams& hp,
             std::uint64_t seed);

    std::string name() const override { return "sac"; }
    Eigen::Index observation_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return act_dim_; }

    Eigen::VectorXd select_action(const Eigen::VectorXd& observation, bool explore) override;
    UpdateDiagnostics update(const TransitionBatch& batch) override;

    nn::TensorMap export_state() const override;
    void import_state(const nn::TensorMap& tensors) override;

    // Policy parameters at the given states; log_std is clamped and the mask
    // marks entries left untouched by the clamp.
    void policy(const Eigen::MatrixXd& states, Eigen::MatrixXd& mu, Eigen::MatrixXd& log_std,
                Eigen::ArrayXXd* clamp_mask = nullptr, nn::ForwardCache* cache = nullptr) const;

    double entropy_coefficient() const { return std::exp(log_alpha_); }

    agents::Network& actor() { return actor_; }
    agents::Network& critic1() { return critic1_; }
    agents::Network& critic2() { return critic2_; }
    nn::ParameterSet& critic1_target() { return critic1_target_; }
    nn::ParameterSet& critic2_target() { return critic2_target_; }

  private:
    Eigen::Index obs_dim_;
    Eigen::Index act_dim_;
    AgentHyperparams hp_;
    agents::Network actor_;
    agents::Network critic1_;
    agents::Network critic2_;
    nn::ParameterSet critic1_target_;
    nn::ParameterSet critic2_target_;
    double log_alpha_;
    nn::ScalarAdam alpha_adam_;
    double target_entropy_;
    std::uint64_t update_count_ = 0;
    Rng rng_;
};

}  // namespace risopt
