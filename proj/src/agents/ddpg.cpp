#include "risopt/agents/ddpg.hpp"

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

DdpgAgent::DdpgAgent(Eigen::Index observation_dim, Eigen::Index action_dim,
                     const AgentHyperparams& hp, std::uint64_t seed)
    : obs_dim_(observation_dim),
      act_dim_(action_dim),
      hp_(hp),
      rng_(mix_seed(seed, 0x64647067)) {
    if (obs_dim_ < 1 || act_dim_ < 1) {
        throw InvalidParameterError("agent dimensions must be positive");
    }
    Rng init_rng(mix_seed(seed, 0x64647067, 0x696e6974));
    const int obs = static_cast<int>(obs_dim_);
    const int act = static_cast<int>(act_dim_);
    actor_ = agents::Network::create(with_ends(obs, hp_.hidden_sizes, act), nn::Activation::Tanh,
                                     hp_.learning_rate, init_rng);
    critic_ = agents::Network::create(with_ends(obs + act, hp_.hidden_sizes, 1),
                                      nn::Activation::Identity, hp_.learning_rate, init_rng);
    actor_target_ = actor_.params;
    critic_target_ = critic_.params;
}

Eigen::VectorXd DdpgAgent::select_action(const Eigen::VectorXd& observation, bool explore) {
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

Eigen::RowVectorXd DdpgAgent::critic_values(const Eigen::MatrixXd& states,
                                            const Eigen::MatrixXd& actions) const {
    return critic_.forward(agents::concat_rows(states, actions)).row(0);
}

double DdpgAgent::actor_objective(const Eigen::MatrixXd& states) const {
    const Eigen::MatrixXd actions = actor_.forward(states);
    return -critic_values(states, actions).mean();
}

nn::ParameterSet DdpgAgent::actor_gradient(const Eigen::MatrixXd& states) const {
    const double inv_batch = 1.0 / static_cast<double>(states.cols());
    nn::ForwardCache actor_cache;
    const Eigen::MatrixXd actions = actor_.forward(states, &actor_cache);
    nn::ForwardCache critic_cache;
    critic_.forward(agents::concat_rows(states, actions), &critic_cache);
    const Eigen::RowVectorXd output_grad =
        Eigen::RowVectorXd::Constant(states.cols(), -inv_batch);
    const nn::Gradients critic_grads =
        nn::backward(critic_.spec, critic_.params, critic_cache, output_grad);
    const Eigen::MatrixXd d_action = critic_grads.input.bottomRows(act_dim_);
    return nn::backward(actor_.spec, actor_.params, actor_cache, d_action).params;
}

UpdateDiagnostics DdpgAgent::update(const TransitionBatch& batch) {
    if (batch.size() < 1) {
        throw InvalidInputError("update requires a non-empty batch");
    }
    const Eigen::MatrixXd next_actions =
        nn::forward(actor_.spec, actor_target_, batch.next_states);
    const Eigen::RowVectorXd q_next =
        nn::forward(critic_.spec, critic_target_,
                    agents::concat_rows(batch.next_states, next_actions))
            .row(0);
    const Eigen::RowVectorXd targets =
        batch.rewards +
        hp_.gamma * (1.0 - batch.done_flags.array()).matrix().cwiseProduct(q_next);

    const double critic_loss =
        agents::mse_step(critic_, agents::concat_rows(batch.states, batch.actions), targets);

    const double actor_loss = actor_objective(batch.states);
    const nn::ParameterSet actor_grads = actor_gradient(batch.states);
    nn::adam_update(actor_.params, actor_grads, actor_.adam);

    nn::soft_update(actor_target_, actor_.params, hp_.tau);
    nn::soft_update(critic_target_, critic_.params, hp_.tau);
    ++update_count_;

    UpdateDiagnostics diag;
    diag.critic_loss = critic_loss;
    diag.actor_loss = actor_loss;
    diag.actor_updated = true;
    diag.targets = targets;
    return diag;
}

nn::TensorMap DdpgAgent::export_state() const {
    nn::TensorMap out;
    agents::export_network(out, "actor", actor_);
    agents::export_network(out, "critic", critic_);
    agents::export_params(out, "actor_target", actor_target_);
    agents::export_params(out, "critic_target", critic_target_);
    agents::export_scalar(out, "update_count", static_cast<double>(update_count_));
    return out;
}

void DdpgAgent::import_state(const nn::TensorMap& tensors) {
    agents::import_network(tensors, "actor", actor_);
    agents::import_network(tensors, "critic", critic_);
    agents::import_params(tensors, "actor_target", actor_target_);
    agents::import_params(tensors, "critic_target", critic_target_);
    update_count_ = static_cast<std::uint64_t>(agents::import_scalar(tensors, "update_count"));
}

}  // namespace risopt
