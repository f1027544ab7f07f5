#include "risopt/fading.hpp"

#include <cmath>

#include "risopt/errors.hpp"

namespace risopt {

FadingParams FadingParams::defaults(int num_ris) {
    FadingParams params;
    params.sigma_ris_sq = Eigen::VectorXd::Constant(num_ris, 1e-7);
    return params;
}

void FadingParams::validate(int num_ris) const {
    if (eta <= 0.0) {
        throw InvalidParameterError("fading: eta must be > 0");
    }
    if (zeta < 0.0) {
        throw InvalidParameterError("fading: path-loss exponent must be >= 0");
    }
    if (rician_k < 0.0) {
        throw InvalidParameterError("fading: Rician factor must be >= 0");
    }
    if (sigma_bs_sq <= 0.0) {
        throw InvalidParameterError("fading: BS noise variance must be > 0");
    }
    if (sigma_ris_sq.size() != num_ris) {
        throw InvalidParameterError("fading: sigma_ris_sq length must equal surface count");
    }
    for (Eigen::Index l = 0; l < sigma_ris_sq.size(); ++l) {
        if (sigma_ris_sq[l] <= 0.0) {
            throw InvalidParameterError("fading: surface noise variance must be > 0");
        }
    }
}

double path_loss_factor(double distance, double eta, double zeta) {
    if (distance <= 0.0) {
        throw InvalidGeometryError("path_loss_factor: distance must be > 0");
    }
    if (eta <= 0.0 || zeta < 0.0) {
        throw InvalidParameterError("path_loss_factor: eta must be > 0 and zeta >= 0");
    }
    return std::sqrt(eta * std::pow(distance, -zeta));
}

double path_loss_factor(double distance, const FadingParams& params) {
    return path_loss_factor(distance, params.eta, params.zeta);
}

std::pair<double, double> rician_components(double rician_k) {
    if (rician_k < 0.0) {
        throw InvalidParameterError("rician_components: Rician factor must be >= 0");
    }
    const double alpha = std::sqrt(rician_k / (1.0 + rician_k));
    const double beta = std::sqrt(1.0 / (1.0 + rician_k));
    return {alpha, beta};
}

}  // namespace risopt
