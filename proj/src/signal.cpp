#include "risopt/signal.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>

#include "risopt/errors.hpp"
#include "risopt/rng.hpp"

namespace risopt {

RisProfile RisProfile::zeros(const std::vector<int>& elements_per_ris, double amplitude_cap) {
    RisProfile profile;
    profile.phi.reserve(elements_per_ris.size());
    for (int n : elements_per_ris) {
        profile.phi.push_back(Eigen::VectorXcd::Zero(n));
    }
    profile.phi_max.assign(elements_per_ris.size(), amplitude_cap);
    return profile;
}

int RisProfile::total_elements() const {
    int total = 0;
    for (const auto& v : phi) {
        total += static_cast<int>(v.size());
    }
    return total;
}

void RisProfile::validate() const {
    if (phi.size() != phi_max.size()) {
        throw InternalConsistencyError("ris profile: cap list length != surface count");
    }
    for (std::size_t l = 0; l < phi.size(); ++l) {
        if (phi_max[l] <= 0.0) {
            throw InvalidParameterError("ris profile: amplitude cap must be > 0");
        }
        for (Eigen::Index n = 0; n < phi[l].size(); ++n) {
            if (std::abs(phi[l][n]) > phi_max[l] * (1.0 + 1e-12)) {
                throw InvalidParameterError("ris profile: |phi| exceeds the amplitude cap");
            }
        }
    }
}

PowerAllocation PowerAllocation::uniform(int num_users, double level, double p_max) {
    return {Eigen::VectorXd::Constant(num_users, level), p_max};
}

void PowerAllocation::validate() const {
    if (p_max <= 0.0) {
        throw InvalidParameterError("powers: p_max must be > 0");
    }
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] < 0.0 || p[k] > p_max * (1.0 + 1e-12)) {
            throw InvalidParameterError("powers: p_k outside [0, p_max]");
        }
    }
}

Eigen::VectorXcd equivalent_channel(const ChannelRealization& channels, const RisProfile& ris,
                                    int k) {
    if (k < 0 || k >= channels.num_users()) {
        throw InternalConsistencyError("equivalent_channel: user index out of range");
    }
    if (ris.num_ris() != channels.num_ris()) {
        throw InternalConsistencyError("equivalent_channel: surface count mismatch");
    }
    Eigen::VectorXcd h = channels.direct[k];
    for (int l = 0; l < channels.num_ris(); ++l) {
        const Eigen::VectorXcd& cascade = channels.user_to_ris[k][l];
        if (ris.phi[l].size() != cascade.size()) {
            throw InternalConsistencyError("equivalent_channel: phi length != N_l");
        }
        h.noalias() += channels.ris_to_bs[l] * ris.phi[l].cwiseProduct(cascade);
    }
    return h;
}

Eigen::MatrixXcd interference_covariance(const ChannelRealization& channels,
                                         const RisProfile& ris, const PowerAllocation& powers,
                                         const NoisePowers& noise, int k) {
    const int m = channels.num_antennas();
    const int num_k = channels.num_users();
    if (powers.p.size() != num_k) {
        throw InternalConsistencyError("interference_covariance: power vector length != K");
    }
    Eigen::MatrixXcd lambda = noise.bs_sq * Eigen::MatrixXcd::Identity(m, m);
    for (int i = 0; i < num_k; ++i) {
        if (i == k) {
            continue;
        }
        const Eigen::VectorXcd h = equivalent_channel(channels, ris, i);
        lambda.noalias() += powers.p[i] * (h * h.adjoint());
    }
    for (int l = 0; l < channels.num_ris(); ++l) {
        // G_l Phi_l Phi_l^H G_l^H = (G_l Phi_l)(G_l Phi_l)^H
        const Eigen::MatrixXcd scaled = channels.ris_to_bs[l] * ris.phi[l].asDiagonal();
        lambda.noalias() += noise.ris_sq[l] * (scaled * scaled.adjoint());
    }
    return lambda;
}

BeamformingMatrix optimal_beamforming(const ChannelRealization& channels, const RisProfile& ris,
                                      const PowerAllocation& powers, const NoisePowers& noise) {
    const int m = channels.num_antennas();
    const int num_k = channels.num_users();
    BeamformingMatrix beams;
    beams.w.resize(m, num_k);
    for (int k = 0; k < num_k; ++k) {
        const Eigen::VectorXcd h = equivalent_channel(channels, ris, k);
        const Eigen::MatrixXcd lambda = interference_covariance(channels, ris, powers, noise, k);
        const Eigen::LLT<Eigen::MatrixXcd> llt(lambda);
        if (llt.info() != Eigen::Success) {
            throw NumericError("optimal_beamforming: covariance not positive definite");
        }
        Eigen::VectorXcd w = llt.solve(h);
        const double norm = w.norm();
        if (norm == 0.0) {
            // Zero equivalent channel; any unit vector satisfies the constraint.
            w = Eigen::VectorXcd::Zero(m);
            w[0] = 1.0;
        } else {
            w /= norm;
        }
        beams.w.col(k) = w;
    }
    return beams;
}

BeamformingMatrix random_beamforming(int num_antennas, int num_users, std::uint64_t seed) {
    if (num_antennas < 1 || num_users < 1) {
        throw InvalidParameterError("random_beamforming: counts must be >= 1");
    }
    Rng rng(mix_seed(seed, 0x7262656dULL));  // "rbem"
    BeamformingMatrix beams;
    beams.w.resize(num_antennas, num_users);
    for (int k = 0; k < num_users; ++k) {
        Eigen::VectorXcd w(num_antennas);
        double norm_sq = 0.0;
        do {
            for (int i = 0; i < num_antennas; ++i) {
                w[i] = rng.complex_normal();
            }
            norm_sq = w.squaredNorm();
        } while (norm_sq == 0.0);
        beams.w.col(k) = w / std::sqrt(norm_sq);
    }
    return beams;
}

double sinr(const ChannelRealization& channels, const RisProfile& ris,
            const PowerAllocation& powers, const BeamformingMatrix& beams,
            const NoisePowers& noise, int k) {
    const Eigen::VectorXcd w = beams.w.col(k);
    const double w_norm_sq = w.squaredNorm();
    if (w_norm_sq == 0.0) {
        throw InvalidInputError("sinr: zero beamforming vector");
    }
    double numerator = 0.0;
    double denominator = noise.bs_sq * w_norm_sq;
    for (int i = 0; i < channels.num_users(); ++i) {
        const Eigen::VectorXcd h = equivalent_channel(channels, ris, i);
        const double projected = std::norm(w.dot(h));  // |w^H h|^2
        if (i == k) {
            numerator = powers.p[i] * projected;
        } else {
            denominator += powers.p[i] * projected;
        }
    }
    for (int l = 0; l < channels.num_ris(); ++l) {
        // ||w^H G_l Phi_l||^2 = sum_n |(G_l^H w)_n|^2 |phi_l[n]|^2
        const Eigen::VectorXcd projected = channels.ris_to_bs[l].adjoint() * w;
        denominator +=
            noise.ris_sq[l] * projected.cwiseAbs2().dot(ris.phi[l].cwiseAbs2());
    }
    return numerator / denominator;
}

McSinrEstimate monte_carlo_sinr(const ChannelRealization& channels, const RisProfile& ris,
                                const PowerAllocation& powers, const BeamformingMatrix& beams,
                                const NoisePowers& noise, int k, long num_samples,
                                std::uint64_t seed) {
    if (num_samples < 1) {
        throw InvalidInputError("monte_carlo_sinr: need at least one sample");
    }
    const Eigen::VectorXcd w = beams.w.col(k);
    if (w.squaredNorm() == 0.0) {
        throw InvalidInputError("monte_carlo_sinr: zero beamforming vector");
    }
    const int num_k = channels.num_users();
    const int num_l = channels.num_ris();
    const int m = channels.num_antennas();

    // Static projections; only symbols and noises are redrawn per sample.
    Eigen::VectorXcd user_gain(num_k);  // sqrt(p_i) w^H h_i^eqv
    for (int i = 0; i < num_k; ++i) {
        user_gain[i] = std::sqrt(powers.p[i]) * w.dot(equivalent_channel(channels, ris, i));
    }
    std::vector<Eigen::VectorXcd> ris_gain(num_l);  // entry n: (w^H G_l Phi_l)_n
    for (int l = 0; l < num_l; ++l) {
        const Eigen::VectorXcd projected = channels.ris_to_bs[l].adjoint() * w;
        ris_gain[l] = ris.phi[l].cwiseProduct(projected.conjugate());
    }

    Rng rng(mix_seed(seed, 0x6d637369ULL));  // "mcsi"
    double desired_power = 0.0;
    double disturbance_power = 0.0;
    for (long s = 0; s < num_samples; ++s) {
        std::complex<double> disturbance = 0.0;
        std::complex<double> desired = 0.0;
        for (int i = 0; i < num_k; ++i) {
            const std::complex<double> symbol = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
            if (i == k) {
                desired = user_gain[i] * symbol;
            } else {
                disturbance += user_gain[i] * symbol;
            }
        }
        for (int l = 0; l < num_l; ++l) {
            const double scale = std::sqrt(noise.ris_sq[l]);
            std::complex<double> projected_noise = 0.0;
            for (Eigen::Index n = 0; n < ris_gain[l].size(); ++n) {
                projected_noise += ris_gain[l][n] * (scale * rng.complex_normal());
            }
            disturbance += projected_noise;
        }
        const double bs_scale = std::sqrt(noise.bs_sq);
        std::complex<double> bs_noise = 0.0;
        for (int i = 0; i < m; ++i) {
            bs_noise += std::conj(w[i]) * (bs_scale * rng.complex_normal());
        }
        disturbance += bs_noise;

        desired_power += std::norm(desired);
        disturbance_power += std::norm(disturbance);
    }
    desired_power /= static_cast<double>(num_samples);
    disturbance_power /= static_cast<double>(num_samples);

    if (disturbance_power == 0.0) {
        return {kSinrOverflowCap, true};
    }
    const double estimate = desired_power / disturbance_power;
    if (estimate > kSinrOverflowCap) {
        return {kSinrOverflowCap, true};
    }
    return {estimate, false};
}

RateReport rate_report(const ChannelRealization& channels, const RisProfile& ris,
                       const PowerAllocation& powers, const BeamformingMatrix& beams,
                       const NoisePowers& noise) {
    const int num_k = channels.num_users();
    RateReport report;
    report.sinr.resize(num_k);
    report.rates.resize(num_k);
    for (int k = 0; k < num_k; ++k) {
        report.sinr[k] = sinr(channels, ris, powers, beams, noise, k);
        report.rates[k] = std::log2(1.0 + report.sinr[k]);
    }
    report.min_rate = report.rates.minCoeff();
    return report;
}

}  // namespace risopt
