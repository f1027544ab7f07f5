#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

#include "risopt/fading.hpp"
#include "risopt/geometry.hpp"

namespace risopt {

// All complex channels of one coherence block: d_k (user->BS direct),
// h_{k->l} (user->surface) and G_l (surface->BS).
struct ChannelRealization {
    std::vector<Eigen::VectorXcd> direct;                    // K vectors of length M
    std::vector<std::vector<Eigen::VectorXcd>> user_to_ris;  // [K][L], length N_l
    std::vector<Eigen::MatrixXcd> ris_to_bs;                 // L matrices, M x N_l

    int num_users() const { return static_cast<int>(direct.size()); }
    int num_ris() const { return static_cast<int>(ris_to_bs.size()); }
    int num_antennas() const { return direct.empty() ? 0 : static_cast<int>(direct[0].size()); }
    int elements(int l) const { return static_cast<int>(ris_to_bs.at(l).cols()); }
    int total_elements() const;

    // Dimensions agree with the geometry and every entry is finite.
    void validate(const SystemGeometry& geometry) const;
};

// Unit-modulus response of a half-wavelength ULA: entry n is
// exp(j*pi*n*cos(azimuth)).
Eigen::VectorXcd ula_steering(int count, double azimuth);

// Horizontal bearing of `to` as seen from `from`.
double azimuth_between(const Eigen::Vector3d& from, const Eigen::Vector3d& to);

// Draws one coherence block: every channel is
// path_loss * (alpha * LoS + beta * NLoS), LoS built from steering vectors of
// the node geometry (G_l LoS is the rank-1 outer product a_BS a_RIS^H), NLoS
// entries i.i.d. CN(0,1). Bit-reproducible given (geometry, params, seed).
ChannelRealization generate_channels(const SystemGeometry& geometry, const FadingParams& params,
                                     std::uint64_t seed);

}  // namespace risopt
