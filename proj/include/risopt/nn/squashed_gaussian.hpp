#pragma once

#include <Eigen/Dense>

#include "risopt/rng.hpp"

namespace risopt::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// log(1 - tanh(u)^2) without cancellation for large |u|.
double tanh_log_jacobian(double u);

double stable_softplus(double x);

inline void clamp_log_std(Eigen::MatrixXd& log_std) {
    log_std = log_std.array().min(kLogStdMax).max(kLogStdMin).matrix();
}

struct GaussianSample {
    Eigen::MatrixXd noise;       // standard normal draws, act_dim x batch
    Eigen::MatrixXd pre_tanh;    // mu + sigma .* noise
    Eigen::MatrixXd action;      // tanh(pre_tanh)
    Eigen::RowVectorXd log_prob; // density of the squashed sample, per column
};

GaussianSample sample_squashed(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_std,
                               Rng& rng);

// Log density of tanh(pre_tanh) under the squashed Gaussian with the given
// parameters, summed over action dimensions.
Eigen::RowVectorXd squashed_log_prob(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_std,
                                     const Eigen::MatrixXd& pre_tanh);

inline Eigen::MatrixXd mean_action(const Eigen::MatrixXd& mu) {
    return mu.array().tanh().matrix();
}

struct PolicyHeadGrads {
    Eigen::MatrixXd d_mu;
    Eigen::MatrixXd d_log_std;
};

// Reparameterized chain rule with the noise held fixed: combines an upstream
// gradient with respect to the action and one with respect to the log density
// into gradients for mu and log_std.
PolicyHeadGrads policy_head_backward(const GaussianSample& sample,
                                     const Eigen::MatrixXd& log_std,
                                     const Eigen::MatrixXd& d_action,
                                     const Eigen::RowVectorXd& d_log_prob);

}  // namespace risopt::nn
