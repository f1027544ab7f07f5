#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "risopt/nn/checkpoint.hpp"
#include "risopt/nn/mlp.hpp"
#include "risopt/nn/optim.hpp"
#include "risopt/rng.hpp"

namespace risopt::agents {

// An MLP with its optimizer state.
struct Network {
    nn::MlpSpec spec;
    nn::ParameterSet params;
    nn::AdamState adam;

    static Network create(std::vector<int> layer_sizes, nn::Activation output_activation,
                          double learning_rate, Rng& rng);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, nn::ForwardCache* cache = nullptr) const {
        return nn::forward(spec, params, input, cache);
    }
};

// Stacks state columns above action columns to form critic input.
Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom);

// One Adam step minimizing mean squared error between the scalar network
// output and `targets`; returns the loss before the step.
double mse_step(Network& net, const Eigen::MatrixXd& input, const Eigen::RowVectorXd& targets);

void export_params(nn::TensorMap& out, const std::string& prefix, const nn::ParameterSet& params);
void import_params(const nn::TensorMap& in, const std::string& prefix, nn::ParameterSet& params);
void export_network(nn::TensorMap& out, const std::string& prefix, const Network& net);
void import_network(const nn::TensorMap& in, const std::string& prefix, Network& net);
void export_scalar(nn::TensorMap& out, const std::string& name, double value);
double import_scalar(const nn::TensorMap& in, const std::string& name);

}  // namespace risopt::agents
