#pragma once

#include "risopt/nn/mlp.hpp"

namespace risopt::nn {

// Adam moment accumulators; shapes mirror the parameter set they update.
struct AdamState {
    ParameterSet first_moment;
    ParameterSet second_moment;
    long step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState create(const MlpSpec& spec, double learning_rate);
};

// One Adam step with bias correction, in place.
void adam_update(ParameterSet& params, const ParameterSet& grads, AdamState& state);

// target <- (1 - tau) * target + tau * online, elementwise.
void soft_update(ParameterSet& target, const ParameterSet& online, double tau);

// Scalar Adam, used for the entropy-coefficient tuner.
struct ScalarAdam {
    double first_moment = 0.0;
    double second_moment = 0.0;
    long step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void update(double& value, double grad);
};

}  // namespace risopt::nn
