#include "risopt/nn/squashed_gaussian.hpp"

#include <cmath>

#include "risopt/errors.hpp"

namespace risopt::nn {

namespace {

constexpr double kLogTwo = 0.6931471805599453;
constexpr double kHalfLogTwoPi = 0.9189385332046727;

}  // namespace

double stable_softplus(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double tanh_log_jacobian(double u) {
    return 2.0 * (kLogTwo - u - stable_softplus(-2.0 * u));
}

GaussianSample sample_squashed(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_std,
                               Rng& rng) {
    if (mu.rows() != log_std.rows() || mu.cols() != log_std.cols()) {
        throw ShapeError("sample_squashed: mu and log_std shapes differ");
    }
    GaussianSample sample;
    const Eigen::Index dim = mu.rows();
    const Eigen::Index batch = mu.cols();
    sample.noise.resize(dim, batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            sample.noise(i, j) = rng.normal();
        }
    }
    const Eigen::MatrixXd sigma = log_std.array().exp().matrix();
    sample.pre_tanh = mu + sigma.cwiseProduct(sample.noise);
    sample.action = sample.pre_tanh.array().tanh().matrix();
    sample.log_prob.resize(batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
        double lp = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            lp += -log_std(i, j) - 0.5 * sample.noise(i, j) * sample.noise(i, j) - kHalfLogTwoPi;
            lp -= tanh_log_jacobian(sample.pre_tanh(i, j));
        }
        sample.log_prob(j) = lp;
    }
    return sample;
}

Eigen::RowVectorXd squashed_log_prob(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_std,
                                     const Eigen::MatrixXd& pre_tanh) {
    if (mu.rows() != log_std.rows() || mu.cols() != log_std.cols() ||
        mu.rows() != pre_tanh.rows() || mu.cols() != pre_tanh.cols()) {
        throw ShapeError("squashed_log_prob: argument shapes differ");
    }
    Eigen::RowVectorXd out(mu.cols());
    for (Eigen::Index j = 0; j < mu.cols(); ++j) {
        double lp = 0.0;
        for (Eigen::Index i = 0; i < mu.rows(); ++i) {
            const double sigma = std::exp(log_std(i, j));
            const double z = (pre_tanh(i, j) - mu(i, j)) / sigma;
            lp += -log_std(i, j) - 0.5 * z * z - kHalfLogTwoPi;
            lp -= tanh_log_jacobian(pre_tanh(i, j));
        }
        out(j) = lp;
    }
    return out;
}

PolicyHeadGrads policy_head_backward(const GaussianSample& sample,
                                     const Eigen::MatrixXd& log_std,
                                     const Eigen::MatrixXd& d_action,
                                     const Eigen::RowVectorXd& d_log_prob) {
    const Eigen::Index dim = sample.action.rows();
    const Eigen::Index batch = sample.action.cols();
    if (d_action.rows() != dim || d_action.cols() != batch || d_log_prob.size() != batch ||
        log_std.rows() != dim || log_std.cols() != batch) {
        throw ShapeError("policy_head_backward: argument shapes differ");
    }
    // d logpi / d pre_tanh = 2 * action; d action / d pre_tanh = 1 - action^2.
    Eigen::MatrixXd d_pre =
        d_action.cwiseProduct((1.0 - sample.action.array().square()).matrix());
    d_pre.noalias() += 2.0 * sample.action * d_log_prob.asDiagonal();

    PolicyHeadGrads grads;
    grads.d_mu = d_pre;
    const Eigen::MatrixXd sigma_noise =
        log_std.array().exp().matrix().cwiseProduct(sample.noise);
    grads.d_log_std = d_pre.cwiseProduct(sigma_noise) - d_log_prob.replicate(dim, 1);
    return grads;
}

}  // namespace risopt::nn
