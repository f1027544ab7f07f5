#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "risopt/rng.hpp"

namespace risopt::nn {

enum class Activation { Identity, Relu, Tanh };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation activation);

// Dense network shape: layer_sizes = [input, hidden..., output].
struct MlpSpec {
    std::vector<int> layer_sizes;
    Activation hidden_activation = Activation::Relu;
    Activation output_activation = Activation::Identity;

    int num_affine_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    Activation activation_of(int layer) const {
        return layer + 1 == num_affine_layers() ? output_activation : hidden_activation;
    }
    void validate() const;  // >= 2 layers, all sizes >= 1
};

// Weights (out x in) and biases per affine layer.
struct ParameterSet {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static ParameterSet zeros(const MlpSpec& spec);
    // He-scaled Gaussian hidden layers; the final affine layer is drawn
    // uniform in +-final_scale so initial outputs stay near zero.
    static ParameterSet init(const MlpSpec& spec, Rng& rng, double final_scale = 3e-3);

    std::size_t parameter_count() const;
    bool same_shape(const ParameterSet& other) const;
    void check_shapes(const MlpSpec& spec) const;  // throws ShapeError
    bool all_finite() const;
};

// Intermediate values retained by forward for the backward pass. `post[i]`
// is the activated output of layer i; `pre[i]` its pre-activation.
struct ForwardCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

// Batched forward pass; columns of `input` are independent samples.
Eigen::MatrixXd forward(const MlpSpec& spec, const ParameterSet& params,
                        const Eigen::MatrixXd& input, ForwardCache* cache = nullptr);

struct Gradients {
    ParameterSet params;      // dLoss/dWeights, dLoss/dBiases
    Eigen::MatrixXd input;    // dLoss/dInput, same shape as the forward input
};

// Exact reverse-mode gradients for the cached forward pass. `output_grad`
// holds dLoss/dOutput column-per-sample.
Gradients backward(const MlpSpec& spec, const ParameterSet& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_grad);

}  // namespace risopt::nn
