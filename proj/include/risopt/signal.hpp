#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/fading.hpp"

namespace risopt {

// Per-surface complex reflection coefficients phi_l with amplitude caps.
struct RisProfile {
    std::vector<Eigen::VectorXcd> phi;  // L vectors, length N_l
    std::vector<double> phi_max;        // per-surface amplitude cap, linear

    static RisProfile zeros(const std::vector<int>& elements_per_ris, double amplitude_cap);

    int num_ris() const { return static_cast<int>(phi.size()); }
    int total_elements() const;

    // |phi_l[n]| <= phi_max[l] everywhere.
    void validate() const;
};

struct PowerAllocation {
    Eigen::VectorXd p;  // K transmit powers, W
    double p_max = 0.0;

    static PowerAllocation uniform(int num_users, double level, double p_max);

    int num_users() const { return static_cast<int>(p.size()); }
    void validate() const;  // 0 <= p_k <= p_max
};

// Receive beamformers, column k is w_k.
struct BeamformingMatrix {
    Eigen::MatrixXcd w;  // M x K

    int num_users() const { return static_cast<int>(w.cols()); }
    int num_antennas() const { return static_cast<int>(w.rows()); }
};

// sigma_l^2 per surface plus sigma_0^2 at the BS. Kept separate from
// FadingParams so degenerate (noise-free) test configurations can be built.
struct NoisePowers {
    Eigen::VectorXd ris_sq;
    double bs_sq = 0.0;

    static NoisePowers from(const FadingParams& params) {
        return {params.sigma_ris_sq, params.sigma_bs_sq};
    }
};

struct RateReport {
    Eigen::VectorXd sinr;   // linear
    Eigen::VectorXd rates;  // log2(1 + sinr), bits/s/Hz
    double min_rate = 0.0;
};

// h_k^eqv = d_k + sum_l G_l diag(phi_l) h_{k->l}.
Eigen::VectorXcd equivalent_channel(const ChannelRealization& channels, const RisProfile& ris,
                                    int k);

// Lambda_k = sum_{i != k} p_i h_i^eqv (h_i^eqv)^H
//          + sum_l sigma_l^2 G_l Phi_l Phi_l^H G_l^H + sigma_0^2 I_M.
Eigen::MatrixXcd interference_covariance(const ChannelRealization& channels,
                                         const RisProfile& ris, const PowerAllocation& powers,
                                         const NoisePowers& noise, int k);

// w_k = Lambda_k^{-1} h_k^eqv, normalized to unit norm (the sqrt(p_k) factor
// cancels under the normalization, which also keeps p_k = 0 well defined).
BeamformingMatrix optimal_beamforming(const ChannelRealization& channels, const RisProfile& ris,
                                      const PowerAllocation& powers, const NoisePowers& noise);

// Each column uniform on the complex unit sphere.
BeamformingMatrix random_beamforming(int num_antennas, int num_users, std::uint64_t seed);

// gamma_k = p_k |w_k^H h_k^eqv|^2 /
//   (sum_{i != k} p_i |w_k^H h_i^eqv|^2
//    + sum_l sigma_l^2 ||w_k^H G_l Phi_l||^2 + sigma_0^2 ||w_k||^2).
double sinr(const ChannelRealization& channels, const RisProfile& ris,
            const PowerAllocation& powers, const BeamformingMatrix& beams,
            const NoisePowers& noise, int k);

inline constexpr double kSinrOverflowCap = 1e12;

struct McSinrEstimate {
    double value = 0.0;
    bool overflow = false;  // empirical interference-plus-noise power was zero
};

// Simulates the received signal with unit-modulus random symbols and Gaussian
// surface/BS noise; returns the ratio of empirical desired power to empirical
// interference-plus-noise power at the beamformer output.
McSinrEstimate monte_carlo_sinr(const ChannelRealization& channels, const RisProfile& ris,
                                const PowerAllocation& powers, const BeamformingMatrix& beams,
                                const NoisePowers& noise, int k, long num_samples,
                                std::uint64_t seed);

RateReport rate_report(const ChannelRealization& channels, const RisProfile& ris,
                       const PowerAllocation& powers, const BeamformingMatrix& beams,
                       const NoisePowers& noise);

}  // namespace risopt
