#include "risopt/agents/agent.hpp"

#include <algorithm>
#include <cctype>

#include "risopt/agents/ddpg.hpp"
#include "risopt/agents/sac.hpp"
#include "risopt/agents/td3.hpp"
#include "risopt/errors.hpp"

namespace risopt {

void AgentHyperparams::validate(std::size_t buffer_capacity) const {
    if (learning_rate <= 0.0) {
        throw InvalidParameterError("learning rate must be positive");
    }
    if (gamma <= 0.0 || gamma >= 1.0) {
        throw InvalidParameterError("discount factor must lie in (0, 1)");
    }
    if (tau <= 0.0 || tau > 1.0) {
        throw InvalidParameterError("tau must lie in (0, 1]");
    }
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > buffer_capacity) {
        throw InvalidParameterError("batch size must lie in [1, buffer capacity]");
    }
    if (hidden_sizes.empty() ||
        std::any_of(hidden_sizes.begin(), hidden_sizes.end(), [](int n) { return n < 1; })) {
        throw InvalidParameterError("hidden layer sizes must be positive");
    }
    if (entropy_coefficient <= 0.0) {
        throw InvalidParameterError("entropy coefficient must be positive");
    }
    if (exploration_noise_std < 0.0 || target_noise_std < 0.0 || target_noise_clip < 0.0) {
        throw InvalidParameterError("noise parameters must be nonnegative");
    }
    if (policy_delay < 1) {
        throw InvalidParameterError("policy delay must be at least 1");
    }
}

void Agent::save(const std::string& path) const { nn::save_tensors(path, export_state()); }

void Agent::load(const std::string& path) { import_state(nn::load_tensors(path)); }

namespace {

// Uniform policy baseline; never learns.
class RandomAgent final : public Agent {
  public:
    RandomAgent(Eigen::Index observation_dim, Eigen::Index action_dim, std::uint64_t seed)
        : obs_dim_(observation_dim), act_dim_(action_dim), rng_(mix_seed(seed, 0x72616e64)) {}

    std::string name() const override { return "random"; }
    Eigen::Index observation_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return act_dim_; }

    Eigen::VectorXd select_action(const Eigen::VectorXd& observation, bool) override {
        if (observation.size() != obs_dim_) {
            throw ShapeError("observation length does not match the agent");
        }
        Eigen::VectorXd action(act_dim_);
        for (Eigen::Index i = 0; i < act_dim_; ++i) {
            action(i) = rng_.uniform(-1.0, 1.0);
        }
        return action;
    }

    UpdateDiagnostics update(const TransitionBatch& batch) override {
        if (batch.size() < 1) {
            throw InvalidInputError("update requires a non-empty batch");
        }
        return {};
    }

    nn::TensorMap export_state() const override { return {}; }
    void import_state(const nn::TensorMap&) override {}

  private:
    Eigen::Index obs_dim_;
    Eigen::Index act_dim_;
    Rng rng_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const std::string& kind, Eigen::Index observation_dim,
                                  Eigen::Index action_dim, const AgentHyperparams& hp,
                                  std::uint64_t seed) {
    std::string lowered = kind;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "sac") {
        return std::make_unique<SacAgent>(observation_dim, action_dim, hp, seed);
    }
    if (lowered == "ddpg") {
        return std::make_unique<DdpgAgent>(observation_dim, action_dim, hp, seed);
    }
    if (lowered == "td3") {
        return std::make_unique<Td3Agent>(observation_dim, action_dim, hp, seed);
    }
    if (lowered == "random") {
        return std::make_unique<RandomAgent>(observation_dim, action_dim, seed);
    }
    throw InvalidParameterError("unknown agent kind: " + kind);
}

}  // namespace risopt
