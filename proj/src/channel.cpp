#include "risopt/channel.hpp"

#include <cmath>

#include "risopt/errors.hpp"
#include "risopt/rng.hpp"

namespace risopt {

namespace {

Eigen::VectorXcd complex_gaussian_vector(int size, Rng& rng) {
    Eigen::VectorXcd v(size);
    for (int i = 0; i < size; ++i) {
        v[i] = rng.complex_normal();
    }
    return v;
}

Eigen::MatrixXcd complex_gaussian_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXcd m(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            m(r, c) = rng.complex_normal();
        }
    }
    return m;
}

}  // namespace

int ChannelRealization::total_elements() const {
    int total = 0;
    for (const auto& g : ris_to_bs) {
        total += static_cast<int>(g.cols());
    }
    return total;
}

void ChannelRealization::validate(const SystemGeometry& geometry) const {
    const int num_k = geometry.num_users();
    const int num_l = geometry.num_ris();
    const int m = geometry.num_antennas;
    if (num_users() != num_k || num_ris() != num_l ||
        static_cast<int>(user_to_ris.size()) != num_k) {
        throw InternalConsistencyError("channels: node counts do not match geometry");
    }
    auto check_finite = [](const Eigen::MatrixXcd& x) {
        if (!x.allFinite()) {
            throw InternalConsistencyError("channels: non-finite entry");
        }
    };
    for (int k = 0; k < num_k; ++k) {
        if (direct[k].size() != m) {
            throw InternalConsistencyError("channels: direct vector length != M");
        }
        check_finite(direct[k]);
        if (static_cast<int>(user_to_ris[k].size()) != num_l) {
            throw InternalConsistencyError("channels: user_to_ris surface count mismatch");
        }
        for (int l = 0; l < num_l; ++l) {
            if (user_to_ris[k][l].size() != geometry.elements_per_ris[l]) {
                throw InternalConsistencyError("channels: user_to_ris length != N_l");
            }
            check_finite(user_to_ris[k][l]);
        }
    }
    for (int l = 0; l < num_l; ++l) {
        if (ris_to_bs[l].rows() != m || ris_to_bs[l].cols() != geometry.elements_per_ris[l]) {
            throw InternalConsistencyError("channels: ris_to_bs shape != M x N_l");
        }
        check_finite(ris_to_bs[l]);
    }
}

Eigen::VectorXcd ula_steering(int count, double azimuth) {
    if (count < 1) {
        throw InvalidParameterError("ula_steering: element count must be >= 1");
    }
    const double phase_step = M_PI * std::cos(azimuth);
    Eigen::VectorXcd v(count);
    for (int n = 0; n < count; ++n) {
        v[n] = std::polar(1.0, phase_step * n);
    }
    return v;
}

double azimuth_between(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    return std::atan2(to.y() - from.y(), to.x() - from.x());
}

ChannelRealization generate_channels(const SystemGeometry& geometry, const FadingParams& params,
                                     std::uint64_t seed) {
    geometry.validate();
    params.validate(geometry.num_ris());

    const auto [alpha, beta] = rician_components(params.rician_k);
    const int num_k = geometry.num_users();
    const int num_l = geometry.num_ris();
    const int m = geometry.num_antennas;

    Rng rng(mix_seed(seed, 0x6368616eULL));  // "chan"

    ChannelRealization channels;
    channels.direct.reserve(num_k);
    channels.user_to_ris.resize(num_k);
    channels.ris_to_bs.reserve(num_l);

    // Draw order is fixed (d_k, then h_{k->l} k-major, then G_l) so one seed
    // pins the whole block.
    for (int k = 0; k < num_k; ++k) {
        const double pl = path_loss_factor(geometry.user_bs_distance(k), params.eta,
                                           params.direct_exponent());
        const Eigen::VectorXcd los =
            ula_steering(m, azimuth_between(geometry.bs_position, geometry.user_positions[k]));
        channels.direct.push_back(pl * (alpha * los + beta * complex_gaussian_vector(m, rng)));
    }
    for (int k = 0; k < num_k; ++k) {
        channels.user_to_ris[k].reserve(num_l);
        for (int l = 0; l < num_l; ++l) {
            const int n = geometry.elements_per_ris[l];
            const double pl = path_loss_factor(geometry.user_ris_distance(k, l), params.eta,
                                               params.user_ris_exponent());
            const Eigen::VectorXcd los = ula_steering(
                n, azimuth_between(geometry.ris_positions[l], geometry.user_positions[k]));
            channels.user_to_ris[k].push_back(
                pl * (alpha * los + beta * complex_gaussian_vector(n, rng)));
        }
    }
    for (int l = 0; l < num_l; ++l) {
        const int n = geometry.elements_per_ris[l];
        const double pl =
            path_loss_factor(geometry.ris_bs_distance(l), params.eta, params.ris_bs_exponent());
        const Eigen::VectorXcd bs_side =
            ula_steering(m, azimuth_between(geometry.bs_position, geometry.ris_positions[l]));
        const Eigen::VectorXcd ris_side =
            ula_steering(n, azimuth_between(geometry.ris_positions[l], geometry.bs_position));
        const Eigen::MatrixXcd los = bs_side * ris_side.adjoint();
        channels.ris_to_bs.push_back(pl *
                                     (alpha * los + beta * complex_gaussian_matrix(m, n, rng)));
    }

    channels.validate(geometry);
    return channels;
}

}  // namespace risopt
