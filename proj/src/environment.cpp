#include "risopt/environment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "risopt/errors.hpp"
#include "risopt/rng.hpp"

namespace risopt {

namespace {

constexpr std::uint64_t kChannelStream = 0x657069736f6465ULL;

}  // namespace

double ScenarioParams::phi_max() const {
    const double exponent = ris_gain_amplitude_reading ? ris_gain_db / 10.0 : ris_gain_db / 20.0;
    return std::pow(10.0, exponent);
}

void ScenarioParams::validate() const {
    if (p_max <= 0.0) {
        throw InvalidParameterError("p_max must be positive");
    }
    if (!(phi_max() > 0.0) || !std::isfinite(phi_max())) {
        throw InvalidParameterError("surface amplitude cap must be positive and finite");
    }
    fading.validate(placement.num_ris);
}

void EpisodeConfig::validate() const {
    if (steps_per_episode < 1) {
        throw InvalidParameterError("steps_per_episode must be at least 1");
    }
}

Eigen::Index observation_dim(int num_users, int total_elements) {
    return 2LL * num_users * (1LL + total_elements);
}

Eigen::Index action_dim(int num_users, int total_elements) {
    return static_cast<Eigen::Index>(num_users) + 2LL * total_elements;
}

Eigen::VectorXd encode_observation(const ChannelRealization& channels,
                                   const BeamformingMatrix& beams) {
    const int num_users = channels.num_users();
    const int num_ris = channels.num_ris();
    const int total = channels.total_elements();
    if (beams.num_users() != num_users || beams.num_antennas() != channels.num_antennas()) {
        throw ShapeError("beamformer shape does not match the channels");
    }
    Eigen::VectorXd obs(observation_dim(num_users, total));

    Eigen::Index re_base = 0;
    Eigen::Index im_base = num_users;
    for (int k = 0; k < num_users; ++k) {
        const std::complex<double> direct = beams.w.col(k).dot(channels.direct[k]);
        obs(re_base + k) = direct.real();
        obs(im_base + k) = direct.imag();
    }

    re_base = 2LL * num_users;
    im_base = re_base + static_cast<Eigen::Index>(num_users) * total;
    Eigen::Index offset = 0;
    for (int k = 0; k < num_users; ++k) {
        for (int l = 0; l < num_ris; ++l) {
            // Row vector w_k^H G_l diag(h_{k->l}); entry n is (w^H G)_n h_n.
            const Eigen::VectorXcd projected =
                (channels.ris_to_bs[l].adjoint() * beams.w.col(k)).conjugate();
            const Eigen::VectorXcd row = projected.cwiseProduct(channels.user_to_ris[k][l]);
            obs.segment(re_base + offset, row.size()) = row.real();
            obs.segment(im_base + offset, row.size()) = row.imag();
            offset += row.size();
        }
    }
    return obs;
}

std::pair<PowerAllocation, RisProfile> decode_action(const Eigen::VectorXd& action,
                                                     int num_users,
                                                     const std::vector<int>& elements_per_ris,
                                                     double p_max, double phi_max) {
    int total = 0;
    for (int n : elements_per_ris) {
        total += n;
    }
    if (action.size() != action_dim(num_users, total)) {
        throw InvalidActionError("action length does not match the scenario");
    }

    PowerAllocation powers;
    powers.p_max = p_max;
    powers.p.resize(num_users);
    for (int k = 0; k < num_users; ++k) {
        powers.p(k) = std::clamp(p_max * (action(k) + 1.0) / 2.0, 0.0, p_max);
    }

    RisProfile ris = RisProfile::zeros(elements_per_ris, phi_max);
    Eigen::Index re_base = num_users;
    Eigen::Index im_base = re_base + total;
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < elements_per_ris.size(); ++l) {
        for (int n = 0; n < elements_per_ris[l]; ++n) {
            std::complex<double> value(phi_max * action(re_base + offset),
                                       phi_max * action(im_base + offset));
            const double magnitude = std::abs(value);
            if (magnitude > phi_max) {
                value *= phi_max / magnitude;
            }
            ris.phi[l](n) = value;
            ++offset;
        }
    }
    return {std::move(powers), std::move(ris)};
}

UplinkEnvironment::UplinkEnvironment(const ScenarioParams& scenario, const EpisodeConfig& episode)
    : scenario_(scenario), episode_(episode) {
    scenario_.validate();
    episode_.validate();
    geometry_ = place_nodes(scenario_.placement, episode_.seed);
    noise_ = NoisePowers::from(scenario_.fading);

    obs_scale_ = Eigen::VectorXd::Ones(observation_dim());
    if (episode_.normalize_observations) {
        const int num_users = geometry_.num_users();
        const int num_ris = geometry_.num_ris();
        const int total = geometry_.total_elements();
        const double root_m = std::sqrt(static_cast<double>(geometry_.num_antennas));
        for (int k = 0; k < num_users; ++k) {
            const double direct_scale =
                root_m * path_loss_factor(geometry_.user_bs_distance(k), scenario_.fading.eta,
                                          scenario_.fading.direct_exponent());
            obs_scale_(k) = direct_scale;
            obs_scale_(num_users + k) = direct_scale;
        }
        Eigen::Index re_base = 2LL * num_users;
        Eigen::Index im_base = re_base + static_cast<Eigen::Index>(num_users) * total;
        Eigen::Index offset = 0;
        for (int k = 0; k < num_users; ++k) {
            for (int l = 0; l < num_ris; ++l) {
                const double cascade_scale =
                    root_m *
                    path_loss_factor(geometry_.ris_bs_distance(l), scenario_.fading.eta,
                                     scenario_.fading.ris_bs_exponent()) *
                    path_loss_factor(geometry_.user_ris_distance(k, l), scenario_.fading.eta,
                                     scenario_.fading.user_ris_exponent());
                for (int n = 0; n < geometry_.elements_per_ris[l]; ++n) {
                    obs_scale_(re_base + offset) = cascade_scale;
                    obs_scale_(im_base + offset) = cascade_scale;
                    ++offset;
                }
            }
        }
    }
}

Eigen::Index UplinkEnvironment::observation_dim() const {
    return risopt::observation_dim(geometry_.num_users(), geometry_.total_elements());
}

Eigen::Index UplinkEnvironment::action_dim() const {
    return risopt::action_dim(geometry_.num_users(), geometry_.total_elements());
}

Eigen::VectorXd UplinkEnvironment::current_observation() const {
    return encode_observation(channels_, beams_).cwiseQuotient(obs_scale_);
}

Eigen::VectorXd UplinkEnvironment::reset() {
    if (steps_taken_ > 0) {
        ++episode_index_;
    }
    steps_taken_ = 0;
    awaiting_reset_ = false;
    if (episode_.redraw_channels_each_episode || !have_channels_) {
        channels_ = generate_channels(geometry_, scenario_.fading,
                                      mix_seed(episode_.seed, kChannelStream, episode_index_));
        have_channels_ = true;
    }
    ris_ = RisProfile::zeros(geometry_.elements_per_ris, scenario_.phi_max());
    powers_ = PowerAllocation::uniform(geometry_.num_users(), scenario_.p_max / 2.0,
                                       scenario_.p_max);
    beams_ = optimal_beamforming(channels_, ris_, powers_, noise_);
    return current_observation();
}

StepResult UplinkEnvironment::step(const Eigen::VectorXd& action) {
    if (awaiting_reset_) {
        throw InvalidStateError(steps_taken_ == 0
                                    ? "step called before reset"
                                    : "episode finished; call reset before stepping again");
    }
    auto [powers, ris] = decode_action(action, geometry_.num_users(),
                                       geometry_.elements_per_ris, scenario_.p_max,
                                       scenario_.phi_max());
    powers_ = std::move(powers);
    ris_ = std::move(ris);
    beams_ = optimal_beamforming(channels_, ris_, powers_, noise_);

    StepResult result;
    result.info = rate_report(channels_, ris_, powers_, beams_, noise_);
    result.reward = result.info.min_rate;
    ++steps_taken_;
    result.done = steps_taken_ >= episode_.steps_per_episode;
    if (result.done) {
        awaiting_reset_ = true;
    }
    result.observation = current_observation();
    return result;
}

}  // namespace risopt
