#pragma once

#include <Eigen/Core>
#include <utility>

namespace risopt {

// Large- and small-scale fading parameters. `eta` is the path-loss gain at
// 1 m (linear), `zeta` the shared path-loss exponent; the per-link exponent
// overrides fall back to `zeta` when negative.
struct FadingParams {
    double eta = 1e-3;
    double zeta = 2.2;
    double rician_k = 2.0;  // linear
    Eigen::VectorXd sigma_ris_sq;  // per-surface noise variance sigma_l^2, W
    double sigma_bs_sq = 1e-7;     // sigma_0^2, W

    double zeta_user_ris = -1.0;
    double zeta_ris_bs = -1.0;

    double direct_exponent() const { return zeta; }
    double user_ris_exponent() const { return zeta_user_ris >= 0.0 ? zeta_user_ris : zeta; }
    double ris_bs_exponent() const { return zeta_ris_bs >= 0.0 ? zeta_ris_bs : zeta; }

    static FadingParams defaults(int num_ris);

    // Throws InvalidParameterError on nonpositive eta/variances, negative
    // exponent or Rician factor, or a sigma_ris_sq length != num_ris.
    void validate(int num_ris) const;
};

// sqrt(eta * distance^-zeta); amplitude attenuation of one link.
double path_loss_factor(double distance, double eta, double zeta);
double path_loss_factor(double distance, const FadingParams& params);

// (alpha, beta) with alpha = sqrt(K_R/(1+K_R)), beta = sqrt(1/(1+K_R)).
std::pair<double, double> rician_components(double rician_k);

}  // namespace risopt
