#include "risopt/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "risopt/errors.hpp"

namespace risopt::nn {

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw InvalidParameterError("unknown activation: " + name);
}

std::string to_string(Activation activation) {
    switch (activation) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "identity";
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw ShapeError("mlp: need at least input and output layers");
    }
    for (int size : layer_sizes) {
        if (size < 1) {
            throw ShapeError("mlp: every layer size must be >= 1");
        }
    }
}

ParameterSet ParameterSet::zeros(const MlpSpec& spec) {
    spec.validate();
    ParameterSet params;
    for (int layer = 0; layer < spec.num_affine_layers(); ++layer) {
        params.weights.emplace_back(
            Eigen::MatrixXd::Zero(spec.layer_sizes[layer + 1], spec.layer_sizes[layer]));
        params.biases.emplace_back(Eigen::VectorXd::Zero(spec.layer_sizes[layer + 1]));
    }
    return params;
}

ParameterSet ParameterSet::init(const MlpSpec& spec, Rng& rng, double final_scale) {
    ParameterSet params = zeros(spec);
    const int last = spec.num_affine_layers() - 1;
    for (int layer = 0; layer <= last; ++layer) {
        Eigen::MatrixXd& w = params.weights[layer];
        if (layer == last) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                for (Eigen::Index r = 0; r < w.rows(); ++r) {
                    w(r, c) = rng.uniform(-final_scale, final_scale);
                }
            }
            for (Eigen::Index r = 0; r < params.biases[layer].size(); ++r) {
                params.biases[layer][r] = rng.uniform(-final_scale, final_scale);
            }
        } else {
            const double stddev = std::sqrt(2.0 / static_cast<double>(w.cols()));
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                for (Eigen::Index r = 0; r < w.rows(); ++r) {
                    w(r, c) = stddev * rng.normal();
                }
            }
        }
    }
    return params;
}

std::size_t ParameterSet::parameter_count() const {
    std::size_t count = 0;
    for (const auto& w : weights) {
        count += static_cast<std::size_t>(w.size());
    }
    for (const auto& b : biases) {
        count += static_cast<std::size_t>(b.size());
    }
    return count;
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
    if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) {
        return false;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].rows() != other.weights[i].rows() ||
            weights[i].cols() != other.weights[i].cols() ||
            biases[i].size() != other.biases[i].size()) {
            return false;
        }
    }
    return true;
}

void ParameterSet::check_shapes(const MlpSpec& spec) const {
    if (static_cast<int>(weights.size()) != spec.num_affine_layers() ||
        biases.size() != weights.size()) {
        throw ShapeError("parameters: layer count does not match spec");
    }
    for (int layer = 0; layer < spec.num_affine_layers(); ++layer) {
        if (weights[layer].rows() != spec.layer_sizes[layer + 1] ||
            weights[layer].cols() != spec.layer_sizes[layer] ||
            biases[layer].size() != spec.layer_sizes[layer + 1]) {
            throw ShapeError("parameters: tensor shape does not match spec");
        }
    }
}

bool ParameterSet::all_finite() const {
    for (const auto& w : weights) {
        if (!w.allFinite()) return false;
    }
    for (const auto& b : biases) {
        if (!b.allFinite()) return false;
    }
    return true;
}

namespace {

void apply_activation(Activation activation, Eigen::MatrixXd& x) {
    switch (activation) {
        case Activation::Identity:
            break;
        case Activation::Relu:
            x = x.cwiseMax(0.0);
            break;
        case Activation::Tanh:
            x = x.array().tanh().matrix();
            break;
    }
}

// dPost/dPre given pre- and post-activation values, applied in place to the
// upstream gradient.
void apply_activation_grad(Activation activation, const Eigen::MatrixXd& pre,
                           const Eigen::MatrixXd& post, Eigen::MatrixXd& grad) {
    switch (activation) {
        case Activation::Identity:
            break;
        case Activation::Relu:
            grad = (pre.array() > 0.0).select(grad, 0.0);
            break;
        case Activation::Tanh:
            grad.array() *= 1.0 - post.array().square();
            break;
    }
}

}  // namespace

Eigen::MatrixXd forward(const MlpSpec& spec, const ParameterSet& params,
                        const Eigen::MatrixXd& input, ForwardCache* cache) {
    params.check_shapes(spec);
    if (input.rows() != spec.input_size()) {
        throw ShapeError("forward: input rows != declared input size");
    }
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->post.clear();
    }
    Eigen::MatrixXd x = input;
    for (int layer = 0; layer < spec.num_affine_layers(); ++layer) {
        Eigen::MatrixXd pre = params.weights[layer] * x;
        pre.colwise() += params.biases[layer];
        if (cache) {
            cache->pre.push_back(pre);
        }
        apply_activation(spec.activation_of(layer), pre);
        if (cache) {
            cache->post.push_back(pre);
        }
        x = std::move(pre);
    }
    return x;
}

Gradients backward(const MlpSpec& spec, const ParameterSet& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_grad) {
    params.check_shapes(spec);
    const int layers = spec.num_affine_layers();
    if (static_cast<int>(cache.pre.size()) != layers ||
        static_cast<int>(cache.post.size()) != layers) {
        throw InvalidStateError("backward: cache does not match a completed forward pass");
    }
    if (output_grad.rows() != spec.output_size() || output_grad.cols() != cache.input.cols()) {
        throw ShapeError("backward: output gradient shape mismatch");
    }

    Gradients grads;
    grads.params = ParameterSet::zeros(spec);

    Eigen::MatrixXd delta = output_grad;
    for (int layer = layers - 1; layer >= 0; --layer) {
        apply_activation_grad(spec.activation_of(layer), cache.pre[layer], cache.post[layer],
                              delta);
        const Eigen::MatrixXd& below = layer == 0 ? cache.input : cache.post[layer - 1];
        grads.params.weights[layer].noalias() = delta * below.transpose();
        grads.params.biases[layer] = delta.rowwise().sum();
        if (layer > 0) {
            delta = params.weights[layer].transpose() * delta;
        } else {
            grads.input.noalias() = params.weights[0].transpose() * delta;
        }
    }
    return grads;
}

}  // namespace risopt::nn
