#include "risopt/nn/optim.hpp"

#include <cmath>

#include "risopt/errors.hpp"

namespace risopt::nn {

AdamState AdamState::create(const MlpSpec& spec, double learning_rate) {
    AdamState state;
    state.first_moment = ParameterSet::zeros(spec);
    state.second_moment = ParameterSet::zeros(spec);
    state.learning_rate = learning_rate;
    return state;
}

namespace {

void adam_tensor(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                 Eigen::Ref<Eigen::MatrixXd> m, Eigen::Ref<Eigen::MatrixXd> v,
                 const AdamState& state, double bias1, double bias2) {
    m = state.beta1 * m + (1.0 - state.beta1) * grad;
    v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    param.array() -= state.learning_rate * (m.array() / bias1) /
                     ((v.array() / bias2).sqrt() + state.epsilon);
}

}  // namespace

void adam_update(ParameterSet& params, const ParameterSet& grads, AdamState& state) {
    if (!params.same_shape(grads) || !params.same_shape(state.first_moment)) {
        throw ShapeError("adam_update: parameter/gradient/moment shapes differ");
    }
    state.step += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, state.step);
    const double bias2 = 1.0 - std::pow(state.beta2, state.step);
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        adam_tensor(params.weights[i], grads.weights[i], state.first_moment.weights[i],
                    state.second_moment.weights[i], state, bias1, bias2);
        adam_tensor(params.biases[i], grads.biases[i], state.first_moment.biases[i],
                    state.second_moment.biases[i], state, bias1, bias2);
    }
}

void soft_update(ParameterSet& target, const ParameterSet& online, double tau) {
    if (!target.same_shape(online)) {
        throw ShapeError("soft_update: parameter shapes differ");
    }
    if (tau <= 0.0 || tau > 1.0) {
        throw InvalidParameterError("soft_update: tau must lie in (0, 1]");
    }
    for (std::size_t i = 0; i < target.weights.size(); ++i) {
        target.weights[i] = (1.0 - tau) * target.weights[i] + tau * online.weights[i];
        target.biases[i] = (1.0 - tau) * target.biases[i] + tau * online.biases[i];
    }
}

void ScalarAdam::update(double& value, double grad) {
    step += 1;
    first_moment = beta1 * first_moment + (1.0 - beta1) * grad;
    second_moment = beta2 * second_moment + (1.0 - beta2) * grad * grad;
    const double m_hat = first_moment / (1.0 - std::pow(beta1, step));
    const double v_hat = second_moment / (1.0 - std::pow(beta2, step));
    value -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
}

}  // namespace risopt::nn
