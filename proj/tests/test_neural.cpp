#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "risopt/agents/networks.hpp"
#include "risopt/errors.hpp"
#include "risopt/nn/checkpoint.hpp"
#include "risopt/nn/mlp.hpp"
#include "risopt/nn/optim.hpp"
#include "risopt/nn/squashed_gaussian.hpp"
#include "risopt/rng.hpp"

using namespace risopt;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("neural");

TEST_CASE("forward composes affine layers and activations") {
    nn::MlpSpec spec;
    spec.layer_sizes = {2, 2, 2};
    spec.hidden_activation = nn::Activation::Identity;
    nn::ParameterSet params = nn::ParameterSet::zeros(spec);
    params.weights[0] = Eigen::MatrixXd::Identity(2, 2);
    params.weights[1] = Eigen::MatrixXd::Identity(2, 2);

    Eigen::MatrixXd input(2, 3);
    input << 1.0, -2.0, 0.5, 4.0, 0.0, -1.5;
    const Eigen::MatrixXd out = nn::forward(spec, params, input);
    CHECK((out - input).norm() == 0.0);
}

TEST_CASE("forward single-layer arithmetic") {
    nn::MlpSpec spec;
    spec.layer_sizes = {2, 1};
    nn::ParameterSet params = nn::ParameterSet::zeros(spec);
    params.weights[0] << 1.0, 1.0;

    Eigen::MatrixXd input(2, 1);
    input << 2.0, 3.0;
    const Eigen::MatrixXd out = nn::forward(spec, params, input);
    CHECK(out(0, 0) == doctest::Approx(5.0).epsilon(1e-15));

    spec.output_activation = nn::Activation::Tanh;
    CHECK(nn::forward(spec, params, input)(0, 0) ==
          doctest::Approx(std::tanh(5.0)).epsilon(1e-15));

    Eigen::MatrixXd wrong(3, 1);
    wrong.setZero();
    CHECK_THROWS_AS(nn::forward(spec, params, wrong), ShapeError);
}

TEST_CASE("forward stays finite on random specs") {
    Rng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        nn::MlpSpec spec;
        spec.layer_sizes = {3, 8, 8, 2};
        spec.hidden_activation = trial % 2 == 0 ? nn::Activation::Relu : nn::Activation::Tanh;
        nn::ParameterSet params = nn::ParameterSet::init(spec, rng);
        Eigen::MatrixXd input(3, 4);
        for (Eigen::Index i = 0; i < input.size(); ++i) {
            input(i) = 100.0 * rng.normal();
        }
        CHECK(nn::forward(spec, params, input).allFinite());
    }
}

TEST_CASE("zero output gradient backpropagates to zero") {
    Rng rng(45);
    nn::MlpSpec spec;
    spec.layer_sizes = {3, 4, 2};
    nn::ParameterSet params = nn::ParameterSet::init(spec, rng);
    nn::ForwardCache cache;
    Eigen::MatrixXd input = Eigen::MatrixXd::Random(3, 5);
    nn::forward(spec, params, input, &cache);
    const nn::Gradients grads = nn::backward(spec, params, cache,
                                             Eigen::MatrixXd::Zero(2, 5));
    for (const auto& w : grads.params.weights) {
        CHECK(w.norm() == 0.0);
    }
    for (const auto& b : grads.params.biases) {
        CHECK(b.norm() == 0.0);
    }
    CHECK(grads.input.norm() == 0.0);
}

TEST_CASE("backward matches central finite differences on a 3-4-2 net") {
    Rng rng(46);
    nn::MlpSpec spec;
    spec.layer_sizes = {3, 4, 2};
    spec.hidden_activation = nn::Activation::Tanh;
    nn::ParameterSet params = nn::ParameterSet::init(spec, rng, 0.5);

    Eigen::MatrixXd input(3, 2);
    for (Eigen::Index i = 0; i < input.size(); ++i) {
        input(i) = rng.normal();
    }
    Eigen::MatrixXd loss_weights(2, 2);
    for (Eigen::Index i = 0; i < loss_weights.size(); ++i) {
        loss_weights(i) = rng.normal();
    }
    const auto loss = [&]() {
        return (nn::forward(spec, params, input).array() * loss_weights.array()).sum();
    };

    nn::ForwardCache cache;
    nn::forward(spec, params, input, &cache);
    const nn::Gradients grads = nn::backward(spec, params, cache, loss_weights);

    constexpr double kStep = 1e-5;
    for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
        for (Eigen::Index i = 0; i < params.weights[layer].size(); ++i) {
            const double saved = params.weights[layer](i);
            params.weights[layer](i) = saved + kStep;
            const double up = loss();
            params.weights[layer](i) = saved - kStep;
            const double down = loss();
            params.weights[layer](i) = saved;
            const double fd = (up - down) / (2.0 * kStep);
            CHECK(grads.params.weights[layer](i) ==
                  doctest::Approx(fd).epsilon(1e-4).scale(1.0));
        }
        for (Eigen::Index i = 0; i < params.biases[layer].size(); ++i) {
            const double saved = params.biases[layer](i);
            params.biases[layer](i) = saved + kStep;
            const double up = loss();
            params.biases[layer](i) = saved - kStep;
            const double down = loss();
            params.biases[layer](i) = saved;
            const double fd = (up - down) / (2.0 * kStep);
            CHECK(grads.params.biases[layer](i) ==
                  doctest::Approx(fd).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("linear network gradient equals the least-squares residual form") {
    Rng rng(47);
    nn::MlpSpec spec;
    spec.layer_sizes = {3, 2};
    nn::ParameterSet params = nn::ParameterSet::init(spec, rng, 0.5);

    Eigen::MatrixXd x(3, 6);
    Eigen::MatrixXd y(2, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = rng.normal();
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) = rng.normal();
    }

    nn::ForwardCache cache;
    const Eigen::MatrixXd out = nn::forward(spec, params, x, &cache);
    // Loss sum_j ||out_j - y_j||^2 has output gradient 2(out - y) and weight
    // gradient 2(Wx + b - y)x^T.
    const nn::Gradients grads = nn::backward(spec, params, cache, 2.0 * (out - y));
    const Eigen::MatrixXd expected_w = 2.0 * (out - y) * x.transpose();
    const Eigen::VectorXd expected_b = 2.0 * (out - y).rowwise().sum();
    CHECK((grads.params.weights[0] - expected_w).norm() < 1e-12 * expected_w.norm());
    CHECK((grads.params.biases[0] - expected_b).norm() < 1e-12 * expected_b.norm());
}

TEST_CASE("adam leaves parameters alone under zero gradient") {
    Rng rng(48);
    nn::MlpSpec spec;
    spec.layer_sizes = {2, 3, 1};
    nn::ParameterSet params = nn::ParameterSet::init(spec, rng);
    const nn::ParameterSet before = params;
    nn::AdamState adam = nn::AdamState::create(spec, 1e-2);
    const nn::ParameterSet zero_grads = nn::ParameterSet::zeros(spec);
    for (int i = 0; i < 5; ++i) {
        nn::adam_update(params, zero_grads, adam);
    }
    for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
        CHECK((params.weights[layer] - before.weights[layer]).norm() == 0.0);
        CHECK((params.biases[layer] - before.biases[layer]).norm() == 0.0);
    }
    CHECK(adam.step == 5);
}

TEST_CASE("first adam step moves by the sign-scaled learning rate") {
    nn::MlpSpec spec;
    spec.layer_sizes = {1, 1};
    nn::ParameterSet params = nn::ParameterSet::zeros(spec);
    nn::AdamState adam = nn::AdamState::create(spec, 1e-2);
    nn::ParameterSet grads = nn::ParameterSet::zeros(spec);
    grads.weights[0](0, 0) = 3.7;
    grads.biases[0](0) = -0.004;
    nn::adam_update(params, grads, adam);
    // Bias-corrected moments equal the raw gradient after one step, so the
    // update is lr * g / (|g| + eps) = lr * sign(g) up to epsilon.
    CHECK(params.weights[0](0, 0) == doctest::Approx(-1e-2).epsilon(1e-6));
    CHECK(params.biases[0](0) == doctest::Approx(1e-2).epsilon(1e-5));
}

TEST_CASE("adam drives a quadratic toward its minimum") {
    nn::MlpSpec spec;
    spec.layer_sizes = {1, 1};
    nn::ParameterSet params = nn::ParameterSet::zeros(spec);
    params.weights[0](0, 0) = 1.0;
    nn::AdamState adam = nn::AdamState::create(spec, 1e-2);
    nn::ParameterSet grads = nn::ParameterSet::zeros(spec);

    double previous = 1.0;
    for (int i = 0; i < 100; ++i) {
        grads.weights[0](0, 0) = 2.0 * params.weights[0](0, 0);
        nn::adam_update(params, grads, adam);
        const double current = params.weights[0](0, 0);
        CHECK(std::abs(current) <= std::abs(previous));
        previous = current;
    }
    CHECK(std::abs(params.weights[0](0, 0)) < 0.5);
}

TEST_CASE("scalar adam matches the tensor version") {
    double value = 0.7;
    nn::ScalarAdam adam;
    adam.learning_rate = 1e-2;

    nn::MlpSpec spec;
    spec.layer_sizes = {1, 1};
    nn::ParameterSet params = nn::ParameterSet::zeros(spec);
    params.weights[0](0, 0) = 0.7;
    nn::AdamState tensor_adam = nn::AdamState::create(spec, 1e-2);
    nn::ParameterSet grads = nn::ParameterSet::zeros(spec);

    Rng rng(49);
    for (int i = 0; i < 20; ++i) {
        const double g = rng.normal();
        adam.update(value, g);
        grads.weights[0](0, 0) = g;
        nn::adam_update(params, grads, tensor_adam);
        CHECK(value == doctest::Approx(params.weights[0](0, 0)).epsilon(1e-12));
    }
}

TEST_CASE("soft update blends and converges geometrically") {
    nn::MlpSpec spec;
    spec.layer_sizes = {2, 2};
    nn::ParameterSet target = nn::ParameterSet::zeros(spec);
    nn::ParameterSet online = nn::ParameterSet::zeros(spec);
    online.weights[0].setConstant(2.0);
    online.biases[0].setConstant(2.0);

    nn::ParameterSet half = target;
    nn::soft_update(half, online, 0.5);
    CHECK(half.weights[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));

    nn::ParameterSet full = target;
    nn::soft_update(full, online, 1.0);
    CHECK((full.weights[0] - online.weights[0]).norm() == 0.0);

    const double tau = 1e-3;
    double gap = 2.0;
    for (int i = 0; i < 10; ++i) {
        nn::soft_update(target, online, tau);
        const double new_gap = 2.0 - target.weights[0](0, 0);
        CHECK(new_gap == doctest::Approx(gap * (1.0 - tau)).epsilon(1e-12));
        gap = new_gap;
    }

    CHECK_THROWS_AS(nn::soft_update(target, online, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(nn::soft_update(target, online, 1.5), InvalidParameterError);
}

TEST_CASE("squashed gaussian collapses to tanh of the mean at tiny sigma") {
    Rng rng(50);
    Eigen::MatrixXd mu(2, 3);
    mu << -0.4, 1.2, 0.0, 2.5, -3.0, 0.7;
    const Eigen::MatrixXd log_std = Eigen::MatrixXd::Constant(2, 3, nn::kLogStdMin);
    const nn::GaussianSample sample = nn::sample_squashed(mu, log_std, rng);
    CHECK((sample.action - mu.array().tanh().matrix()).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((nn::mean_action(mu) - mu.array().tanh().matrix()).norm() == 0.0);
}

TEST_CASE("squashed log density normalizes and matches its sampler") {
    // Quadrature of exp(log_prob) over the action interval.
    const Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(1, 1, 0.3);
    const Eigen::MatrixXd log_std = Eigen::MatrixXd::Constant(1, 1, -0.2);
    constexpr int kIntervals = 20000;
    const double lo = -1.0 + 1e-10;
    const double hi = 1.0 - 1e-10;
    const double h = (hi - lo) / kIntervals;
    const auto density = [&](double a) {
        Eigen::MatrixXd pre(1, 1);
        pre(0, 0) = std::atanh(a);
        return std::exp(nn::squashed_log_prob(mu, log_std, pre)(0));
    };
    double integral = density(lo) + density(hi);
    for (int i = 1; i < kIntervals; ++i) {
        integral += density(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    integral *= h / 3.0;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));

    // Empirical mean of samples against the quadrature mean.
    double mean_quadrature = 0.0;
    for (int i = 1; i < kIntervals; ++i) {
        const double a = lo + i * h;
        mean_quadrature += a * density(a) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    mean_quadrature *= h / 3.0;

    Rng rng(51);
    constexpr int kSamples = 100000;
    const Eigen::MatrixXd mu_batch = Eigen::MatrixXd::Constant(1, kSamples, 0.3);
    const Eigen::MatrixXd log_std_batch = Eigen::MatrixXd::Constant(1, kSamples, -0.2);
    const nn::GaussianSample sample = nn::sample_squashed(mu_batch, log_std_batch, rng);
    const double mean_empirical = sample.action.mean();
    const double stderr3 = 3.0 / std::sqrt(static_cast<double>(kSamples));
    CHECK(std::abs(mean_empirical - mean_quadrature) < stderr3);

    // log_prob reported by the sampler agrees with the density function.
    const Eigen::RowVectorXd recomputed =
        nn::squashed_log_prob(mu_batch.leftCols(5), log_std_batch.leftCols(5),
                              sample.pre_tanh.leftCols(5));
    CHECK((recomputed - sample.log_prob.head(5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tanh jacobian stays accurate far into the tails") {
    for (double u : {0.0, 0.5, -1.5, 3.0, -8.0, 20.0, -40.0, 200.0}) {
        const double exact = std::log1p(-std::tanh(u) * std::tanh(u));
        const double stable = nn::tanh_log_jacobian(u);
        if (std::abs(u) < 18.0) {
            CHECK(stable == doctest::Approx(exact).epsilon(1e-9));
        } else {
            // log1p underflows to -inf out here; the stable form must not.
            CHECK(std::isfinite(stable));
            CHECK(stable == doctest::Approx(2.0 * (std::log(2.0) - std::abs(u)))
                                .epsilon(1e-9));
        }
    }
}

TEST_CASE("policy head backward matches finite differences") {
    Rng rng(52);
    const int dim = 3;
    const int batch = 4;
    Eigen::MatrixXd mu(dim, batch);
    Eigen::MatrixXd log_std(dim, batch);
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        mu(i) = 0.5 * rng.normal();
        log_std(i) = -0.5 + 0.3 * rng.normal();
    }
    const nn::GaussianSample sample = nn::sample_squashed(mu, log_std, rng);

    Eigen::MatrixXd d_action(dim, batch);
    Eigen::RowVectorXd d_log_prob(batch);
    for (Eigen::Index i = 0; i < d_action.size(); ++i) {
        d_action(i) = rng.normal();
    }
    for (int j = 0; j < batch; ++j) {
        d_log_prob(j) = rng.normal();
    }

    const nn::PolicyHeadGrads grads =
        nn::policy_head_backward(sample, log_std, d_action, d_log_prob);

    // Scalar objective with the noise frozen: sum(d_action .* a) +
    // sum(d_log_prob .* log_prob).
    const auto objective = [&](const Eigen::MatrixXd& m, const Eigen::MatrixXd& ls) {
        const Eigen::MatrixXd pre = m + ls.array().exp().matrix().cwiseProduct(sample.noise);
        const Eigen::MatrixXd action = pre.array().tanh().matrix();
        const Eigen::RowVectorXd log_prob = nn::squashed_log_prob(m, ls, pre);
        return (d_action.array() * action.array()).sum() +
               (d_log_prob.array() * log_prob.array()).sum();
    };

    constexpr double kStep = 1e-6;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        Eigen::MatrixXd up = mu;
        Eigen::MatrixXd down = mu;
        up(i) += kStep;
        down(i) -= kStep;
        const double fd = (objective(up, log_std) - objective(down, log_std)) / (2.0 * kStep);
        CHECK(grads.d_mu(i) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));

        Eigen::MatrixXd ls_up = log_std;
        Eigen::MatrixXd ls_down = log_std;
        ls_up(i) += kStep;
        ls_down(i) -= kStep;
        const double fd_ls =
            (objective(mu, ls_up) - objective(mu, ls_down)) / (2.0 * kStep);
        CHECK(grads.d_log_std(i) == doctest::Approx(fd_ls).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("checkpoint round trip preserves tensors exactly") {
    nn::TensorMap tensors;
    Rng rng(53);
    tensors["actor/w0"] = Eigen::MatrixXd::Random(4, 7);
    tensors["actor/b0"] = Eigen::MatrixXd::Random(4, 1);
    tensors["alpha"] = Eigen::MatrixXd::Constant(1, 1, -2.5);
    tensors["empty_name_guard"] = Eigen::MatrixXd::Random(1, 3);

    const std::string path = temp_path("risopt_ckpt_test.bin");
    nn::save_tensors(path, tensors);
    const nn::TensorMap loaded = nn::load_tensors(path);
    REQUIRE(loaded.size() == tensors.size());
    for (const auto& [name, value] : tensors) {
        REQUIRE(loaded.count(name) == 1);
        CHECK((loaded.at(name) - value).norm() == 0.0);
    }
    std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects corruption") {
    const std::string path = temp_path("risopt_ckpt_corrupt.bin");
    nn::TensorMap tensors;
    tensors["w"] = Eigen::MatrixXd::Random(3, 3);
    nn::save_tensors(path, tensors);

    std::fstream file(path, std::ios::in | std::ios::out | std::ios::binary);
    file.seekp(0);
    file.write("BOGUSFMT", 8);
    file.close();
    CHECK_THROWS_AS(nn::load_tensors(path), IoError);

    nn::save_tensors(path, tensors);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
    CHECK_THROWS_AS(nn::load_tensors(path), IoError);

    CHECK_THROWS_AS(nn::load_tensors(temp_path("risopt_ckpt_missing.bin")), IoError);
    std::remove(path.c_str());
}

TEST_CASE("mse step reduces the regression loss") {
    Rng rng(54);
    agents::Network net = agents::Network::create({3, 16, 1}, nn::Activation::Identity,
                                                  1e-2, rng);
    Eigen::MatrixXd input = Eigen::MatrixXd::Random(3, 8);
    Eigen::RowVectorXd targets = Eigen::RowVectorXd::Random(8);

    const double first = agents::mse_step(net, input, targets);
    double last = first;
    for (int i = 0; i < 200; ++i) {
        last = agents::mse_step(net, input, targets);
    }
    CHECK(last < first * 0.1);
}

TEST_CASE("parameter export import round trip") {
    Rng rng(55);
    agents::Network net = agents::Network::create({4, 8, 2}, nn::Activation::Tanh, 1e-3, rng);
    nn::TensorMap out;
    agents::export_network(out, "net", net);

    agents::Network copy = agents::Network::create({4, 8, 2}, nn::Activation::Tanh, 1e-3, rng);
    agents::import_network(out, "net", copy);
    const Eigen::MatrixXd probe = Eigen::MatrixXd::Random(4, 5);
    CHECK((net.forward(probe) - copy.forward(probe)).norm() == 0.0);

    nn::TensorMap truncated = out;
    truncated.erase("net/p/w0");
    CHECK_THROWS_AS(agents::import_network(truncated, "net", copy), IoError);
}

TEST_SUITE_END();
