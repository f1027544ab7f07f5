#include "risopt/agents/networks.hpp"

#include "risopt/errors.hpp"

namespace risopt::agents {

Network Network::create(std::vector<int> layer_sizes, nn::Activation output_activation,
                        double learning_rate, Rng& rng) {
    Network net;
    net.spec.layer_sizes = std::move(layer_sizes);
    net.spec.hidden_activation = nn::Activation::Relu;
    net.spec.output_activation = output_activation;
    net.spec.validate();
    net.params = nn::ParameterSet::init(net.spec, rng);
    net.adam = nn::AdamState::create(net.spec, learning_rate);
    return net;
}

Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
    if (top.cols() != bottom.cols()) {
        throw ShapeError("concat_rows: column counts differ");
    }
    Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
    out.topRows(top.rows()) = top;
    out.bottomRows(bottom.rows()) = bottom;
    return out;
}

double mse_step(Network& net, const Eigen::MatrixXd& input, const Eigen::RowVectorXd& targets) {
    nn::ForwardCache cache;
    const Eigen::MatrixXd out = net.forward(input, &cache);
    if (out.rows() != 1 || out.cols() != targets.size()) {
        throw ShapeError("mse_step: network output and targets differ in shape");
    }
    const Eigen::RowVectorXd residual = out.row(0) - targets;
    const double inv_batch = 1.0 / static_cast<double>(targets.size());
    const double loss = residual.squaredNorm() * inv_batch;
    const Eigen::MatrixXd output_grad = 2.0 * inv_batch * residual;
    const nn::Gradients grads = nn::backward(net.spec, net.params, cache, output_grad);
    nn::adam_update(net.params, grads.params, net.adam);
    return loss;
}

void export_params(nn::TensorMap& out, const std::string& prefix,
                   const nn::ParameterSet& params) {
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        out[prefix + "/w" + std::to_string(i)] = params.weights[i];
        out[prefix + "/b" + std::to_string(i)] = params.biases[i];
    }
}

void import_params(const nn::TensorMap& in, const std::string& prefix,
                   nn::ParameterSet& params) {
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const auto w_it = in.find(prefix + "/w" + std::to_string(i));
        const auto b_it = in.find(prefix + "/b" + std::to_string(i));
        if (w_it == in.end() || b_it == in.end()) {
            throw IoError("checkpoint is missing tensors under " + prefix);
        }
        if (w_it->second.rows() != params.weights[i].rows() ||
            w_it->second.cols() != params.weights[i].cols() ||
            b_it->second.rows() != params.biases[i].rows() || b_it->second.cols() != 1) {
            throw ShapeError("checkpoint tensor shape mismatch under " + prefix);
        }
        params.weights[i] = w_it->second;
        params.biases[i] = b_it->second.col(0);
    }
}

void export_network(nn::TensorMap& out, const std::string& prefix, const Network& net) {
    export_params(out, prefix + "/p", net.params);
    export_params(out, prefix + "/adam_m", net.adam.first_moment);
    export_params(out, prefix + "/adam_v", net.adam.second_moment);
    export_scalar(out, prefix + "/adam_step", static_cast<double>(net.adam.step));
}

void import_network(const nn::TensorMap& in, const std::string& prefix, Network& net) {
    import_params(in, prefix + "/p", net.params);
    import_params(in, prefix + "/adam_m", net.adam.first_moment);
    import_params(in, prefix + "/adam_v", net.adam.second_moment);
    net.adam.step = static_cast<long>(import_scalar(in, prefix + "/adam_step"));
}

void export_scalar(nn::TensorMap& out, const std::string& name, double value) {
    out[name] = Eigen::MatrixXd::Constant(1, 1, value);
}

double import_scalar(const nn::TensorMap& in, const std::string& name) {
    const auto it = in.find(name);
    if (it == in.end() || it->second.size() != 1) {
        throw IoError("checkpoint is missing scalar " + name);
    }
    return it->second(0, 0);
}

}  // namespace risopt::agents
