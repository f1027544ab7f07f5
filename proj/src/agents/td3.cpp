#include "risopt/agents/td3.hpp"

#include <algorithm>

#include "risopt/errors.hpp"

namespace risopt {

namespace {

std::vector<int> with_ends(int input, const std::vector<int>& hidden, int output) {
    std::vector<int> sizes;
    sizes.reserve(hidden.size() + 2);
    sizes.push_back(input);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output);
    return sizes;
}

}  // namespace

Td3Agent::Td3Agent(Eigen::Index observation_dim, Eigen::Index action_dim,
                   const AgentHyperparams& hp, std::uint64_t seed)
    : obs_dim_(observation_dim),
      act_dim_(action_dim),
      hp_(hp),
      rng_(mix_seed(seed, 0x746433)) {
    if (obs_dim_ < 1 || act_dim_ < 1) {
        throw InvalidParameterError("agent dimensions must be positive");
    }
    Rng init_rng(mix_seed(seed, 0x746433, 0x696e6974));
    const int obs = static_cast<int>(obs_dim_);
    const int act = static_cast<int>(act_dim_);
    actor_ = agents::Network::create(with_ends(obs, hp_.hidden_sizes, act), nn::Activation::Tanh,
                                     hp_.learning_rate, init_rng);
    critic1_ = agents::Network::create(with_ends(obs + act, hp_.hidden_sizes, 1),
                                       nn::Activation::Identity, hp_.learning_rate, init_rng);
    critic2_ = agents::Network::create(with_ends(obs + act, hp_.hidden_sizes, 1),
                                       nn::Activation::Identity, hp_.learning_rate, init_rng);
    actor_target_ = actor_.params;
    critic1_target_ = critic1_.params;
    critic2_target_ = critic2_.params;
}

Eigen::VectorXd Td3Agent::select_action(const Eigen::VectorXd& observation, bool explore) {
    if (observation.size() != obs_dim_) {
        throw ShapeError("observation length does not match the agent");
    }
    Eigen::VectorXd action = actor_.forward(observation).col(0);
    if (explore) {
        for (Eigen::Index i = 0; i < action.size(); ++i) {
            action(i) = std::clamp(action(i) + hp_.exploration_noise_std * rng_.normal(),
                                   -1.0, 1.0);
        }
    }
    return action;
}

UpdateDiagnostics Td3Agent::update(const TransitionBatch& batch) {
    return update_at(batch, update_count_ + 1);
}

UpdateDiagnostics Td3Agent::update_at(const TransitionBatch& batch, std::uint64_t update_index) {
    if (batch.size() < 1) {
        throw InvalidInputError("update requires a non-empty batch");
    }
    const Eigen::Index batch_size = batch.size();

    Eigen::MatrixXd next_actions = nn::forward(actor_.spec, actor_target_, batch.next_states);
    for (Eigen::Index j = 0; j < batch_size; ++j) {
        for (Eigen::Index i = 0; i < act_dim_; ++i) {
            const double noise = std::clamp(hp_.target_noise_std * rng_.normal(),
                                            -hp_.target_noise_clip, hp_.target_noise_clip);
            next_actions(i, j) = std::clamp(next_actions(i, j) + noise, -1.0, 1.0);
        }
    }
    const Eigen::MatrixXd next_input = agents::concat_rows(batch.next_states, next_actions);
    const Eigen::RowVectorXd q1_next =
        nn::forward(critic1_.spec, critic1_target_, next_input).row(0);
    const Eigen::RowVectorXd q2_next =
        nn::forward(critic2_.spec, critic2_target_, next_input).row(0);
    const Eigen::RowVectorXd targets =
        batch.rewards + hp_.gamma * (1.0 - batch.done_flags.array())
                            .matrix()
                            .cwiseProduct(q1_next.cwiseMin(q2_next));

    const Eigen::MatrixXd critic_input = agents::concat_rows(batch.states, batch.actions);
    const double critic1_loss = agents::mse_step(critic1_, critic_input, targets);
    const double critic2_loss = agents::mse_step(critic2_, critic_input, targets);

    UpdateDiagnostics diag;
    diag.critic_loss = 0.5 * (critic1_loss + critic2_loss);
    diag.targets = targets;

    if (update_index % static_cast<std::uint64_t>(hp_.policy_delay) == 0) {
        const double inv_batch = 1.0 / static_cast<double>(batch_size);
        nn::ForwardCache actor_cache;
        const Eigen::MatrixXd actions = actor_.forward(batch.states, &actor_cache);
        nn::ForwardCache critic_cache;
        const Eigen::RowVectorXd q_pi =
            critic1_.forward(agents::concat_rows(batch.states, actions), &critic_cache).row(0);
        diag.actor_loss = -q_pi.mean();
        const Eigen::RowVectorXd output_grad =
            Eigen::RowVectorXd::Constant(batch_size, -inv_batch);
        const nn::Gradients critic_grads =
            nn::backward(critic1_.spec, critic1_.params, critic_cache, output_grad);
        const nn::ParameterSet actor_grads =
            nn::backward(actor_.spec, actor_.params, actor_cache,
                         critic_grads.input.bottomRows(act_dim_))
                .params;
        nn::adam_update(actor_.params, actor_grads, actor_.adam);

        nn::soft_update(actor_target_, actor_.params, hp_.tau);
        nn::soft_update(critic1_target_, critic1_.params, hp_.tau);
        nn::soft_update(critic2_target_, critic2_.params, hp_.tau);
        diag.actor_updated = true;
    }

    update_count_ = update_index;
    return diag;
}

nn::TensorMap Td3Agent::export_state() const {
    nn::TensorMap out;
    agents::export_network(out, "actor", actor_);
    agents::export_network(out, "critic1", critic1_);
    agents::export_network(out, "critic2", critic2_);
    agents::export_params(out, "actor_target", actor_target_);
    agents::export_params(out, "critic1_target", critic1_target_);
    agents::export_params(out, "critic2_target", critic2_target_);
    agents::export_scalar(out, "update_count", static_cast<double>(update_count_));
    return out;
}

void Td3Agent::import_state(const nn::TensorMap& tensors) {
    agents::import_network(tensors, "actor", actor_);
    agents::import_network(tensors, "critic1", critic1_);
    agents::import_network(tensors, "critic2", critic2_);
    agents::import_params(tensors, "actor_target", actor_target_);
    agents::import_params(tensors, "critic1_target", critic1_target_);
    agents::import_params(tensors, "critic2_target", critic2_target_);
    update_count_ = static_cast<std::uint64_t>(agents::import_scalar(tensors, "update_count"));
}

}  // namespace risopt
