#include "risopt/agents/sac.hpp"

#include <cmath>

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

SacAgent::SacAgent(Eigen::Index observation_dim, Eigen::Index action_dim,
                   const AgentHyperparams& hp, std::uint64_t seed)
    : obs_dim_(observation_dim),
      act_dim_(action_dim),
      hp_(hp),
      rng_(mix_seed(seed, 0x736163)) {
    if (obs_dim_ < 1 || act_dim_ < 1) {
        throw InvalidParameterError("agent dimensions must be positive");
    }
    Rng init_rng(mix_seed(seed, 0x736163, 0x696e6974));
    const int obs = static_cast<int>(obs_dim_);
    const int act = static_cast<int>(act_dim_);
    actor_ = agents::Network::create(with_ends(obs, hp_.hidden_sizes, 2 * act),
                                     nn::Activation::Identity, hp_.learning_rate, init_rng);
    critic1_ = agents::Network::create(with_ends(obs + act, hp_.hidden_sizes, 1),
                                       nn::Activation::Identity, hp_.learning_rate, init_rng);
    critic2_ = agents::Network::create(with_ends(obs + act, hp_.hidden_sizes, 1),
                                       nn::Activation::Identity, hp_.learning_rate, init_rng);
    critic1_target_ = critic1_.params;
    critic2_target_ = critic2_.params;
    log_alpha_ = std::log(hp_.entropy_coefficient);
    alpha_adam_.learning_rate = hp_.learning_rate;
    target_entropy_ = -static_cast<double>(act_dim_);
}

void SacAgent::policy(const Eigen::MatrixXd& states, Eigen::MatrixXd& mu,
                      Eigen::MatrixXd& log_std, Eigen::ArrayXXd* clamp_mask,
                      nn::ForwardCache* cache) const {
    const Eigen::MatrixXd head = actor_.forward(states, cache);
    mu = head.topRows(act_dim_);
    log_std = head.bottomRows(act_dim_);
    if (clamp_mask != nullptr) {
        *clamp_mask = (log_std.array() > nn::kLogStdMin && log_std.array() < nn::kLogStdMax)
                          .cast<double>();
    }
    nn::clamp_log_std(log_std);
}

Eigen::VectorXd SacAgent::select_action(const Eigen::VectorXd& observation, bool explore) {
    if (observation.size() != obs_dim_) {
        throw ShapeError("observation length does not match the agent");
    }
    Eigen::MatrixXd mu;
    Eigen::MatrixXd log_std;
    policy(observation, mu, log_std);
    if (!explore) {
        return nn::mean_action(mu).col(0);
    }
    return nn::sample_squashed(mu, log_std, rng_).action.col(0);
}

UpdateDiagnostics SacAgent::update(const TransitionBatch& batch) {
    if (batch.size() < 1) {
        throw InvalidInputError("update requires a non-empty batch");
    }
    const Eigen::Index batch_size = batch.size();
    const double inv_batch = 1.0 / static_cast<double>(batch_size);
    const double alpha = std::exp(log_alpha_);

    // Soft Bellman targets from the target critics and a fresh policy sample.
    Eigen::MatrixXd next_mu;
    Eigen::MatrixXd next_log_std;
    policy(batch.next_states, next_mu, next_log_std);
    const nn::GaussianSample next_sample = nn::sample_squashed(next_mu, next_log_std, rng_);
    const Eigen::MatrixXd next_input = agents::concat_rows(batch.next_states, next_sample.action);
    const Eigen::RowVectorXd q1_next =
        nn::forward(critic1_.spec, critic1_target_, next_input).row(0);
    const Eigen::RowVectorXd q2_next =
        nn::forward(critic2_.spec, critic2_target_, next_input).row(0);
    const Eigen::RowVectorXd soft_value =
        q1_next.cwiseMin(q2_next) - alpha * next_sample.log_prob;
    const Eigen::RowVectorXd targets =
        batch.rewards +
        hp_.gamma * (1.0 - batch.done_flags.array()).matrix().cwiseProduct(soft_value);

    const Eigen::MatrixXd critic_input = agents::concat_rows(batch.states, batch.actions);
    const double critic1_loss = agents::mse_step(critic1_, critic_input, targets);
    const double critic2_loss = agents::mse_step(critic2_, critic_input, targets);

    // Actor step: minimize mean(alpha * log pi - min Q) over a reparameterized sample.
    Eigen::MatrixXd mu;
    Eigen::MatrixXd log_std;
    Eigen::ArrayXXd clamp_mask;
    nn::ForwardCache actor_cache;
    policy(batch.states, mu, log_std, &clamp_mask, &actor_cache);
    const nn::GaussianSample sample = nn::sample_squashed(mu, log_std, rng_);
    const Eigen::MatrixXd policy_input = agents::concat_rows(batch.states, sample.action);
    nn::ForwardCache q1_cache;
    nn::ForwardCache q2_cache;
    const Eigen::RowVectorXd q1_pi = critic1_.forward(policy_input, &q1_cache).row(0);
    const Eigen::RowVectorXd q2_pi = critic2_.forward(policy_input, &q2_cache).row(0);
    const Eigen::RowVectorXd q_min = q1_pi.cwiseMin(q2_pi);
    const double actor_loss = (alpha * sample.log_prob - q_min).mean();

    const Eigen::RowVectorXd use_q1 =
        (q1_pi.array() <= q2_pi.array()).cast<double>().matrix();
    const Eigen::RowVectorXd grad1 = -inv_batch * use_q1;
    const Eigen::RowVectorXd grad2 =
        -inv_batch * (Eigen::RowVectorXd::Ones(batch_size) - use_q1);
    const nn::Gradients q1_grads = nn::backward(critic1_.spec, critic1_.params, q1_cache, grad1);
    const nn::Gradients q2_grads = nn::backward(critic2_.spec, critic2_.params, q2_cache, grad2);
    const Eigen::MatrixXd d_action =
        q1_grads.input.bottomRows(act_dim_) + q2_grads.input.bottomRows(act_dim_);
    const Eigen::RowVectorXd d_log_prob =
        Eigen::RowVectorXd::Constant(batch_size, alpha * inv_batch);
    const nn::PolicyHeadGrads head_grads =
        nn::policy_head_backward(sample, log_std, d_action, d_log_prob);
    Eigen::MatrixXd actor_out_grad(2 * act_dim_, batch_size);
    actor_out_grad.topRows(act_dim_) = head_grads.d_mu;
    actor_out_grad.bottomRows(act_dim_) =
        (head_grads.d_log_std.array() * clamp_mask).matrix();
    const nn::Gradients actor_grads =
        nn::backward(actor_.spec, actor_.params, actor_cache, actor_out_grad);
    nn::adam_update(actor_.params, actor_grads.params, actor_.adam);

    if (hp_.auto_entropy) {
        const double alpha_grad = -(sample.log_prob.mean() + target_entropy_);
        alpha_adam_.update(log_alpha_, alpha_grad);
    }

    nn::soft_update(critic1_target_, critic1_.params, hp_.tau);
    nn::soft_update(critic2_target_, critic2_.params, hp_.tau);
    ++update_count_;

    UpdateDiagnostics diag;
    diag.critic_loss = 0.5 * (critic1_loss + critic2_loss);
    diag.actor_loss = actor_loss;
    diag.entropy = -sample.log_prob.mean();
    diag.entropy_coefficient = std::exp(log_alpha_);
    diag.actor_updated = true;
    diag.targets = targets;
    return diag;
}

nn::TensorMap SacAgent::export_state() const {
    nn::TensorMap out;
    agents::export_network(out, "actor", actor_);
    agents::export_network(out, "critic1", critic1_);
    agents::export_network(out, "critic2", critic2_);
    agents::export_params(out, "critic1_target", critic1_target_);
    agents::export_params(out, "critic2_target", critic2_target_);
    agents::export_scalar(out, "log_alpha", log_alpha_);
    agents::export_scalar(out, "alpha_adam_m", alpha_adam_.first_moment);
    agents::export_scalar(out, "alpha_adam_v", alpha_adam_.second_moment);
    agents::export_scalar(out, "alpha_adam_step", static_cast<double>(alpha_adam_.step));
    agents::export_scalar(out, "update_count", static_cast<double>(update_count_));
    return out;
}

void SacAgent::import_state(const nn::TensorMap& tensors) {
    agents::import_network(tensors, "actor", actor_);
    agents::import_network(tensors, "critic1", critic1_);
    agents::import_network(tensors, "critic2", critic2_);
    agents::import_params(tensors, "critic1_target", critic1_target_);
    agents::import_params(tensors, "critic2_target", critic2_target_);
    log_alpha_ = agents::import_scalar(tensors, "log_alpha");
    alpha_adam_.first_moment = agents::import_scalar(tensors, "alpha_adam_m");
    alpha_adam_.second_moment = agents::import_scalar(tensors, "alpha_adam_v");
    alpha_adam_.step = static_cast<long>(agents::import_scalar(tensors, "alpha_adam_step"));
    update_count_ = static_cast<std::uint64_t>(agents::import_scalar(tensors, "update_count"));
}

}  // namespace risopt
