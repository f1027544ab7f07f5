#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/fading.hpp"
#include "risopt/geometry.hpp"
#include "risopt/signal.hpp"

namespace risopt {

// 23 dBm.
inline constexpr double kDefaultPMaxWatts = 0.19952623149688797;

// Physical scenario: node layout, fading statistics, and the action-space
// bounds (per-user power cap and surface amplitude cap).
struct ScenarioParams {
    PlacementConfig placement;
    FadingParams fading = FadingParams::defaults(4);
    double p_max = kDefaultPMaxWatts;
    double ris_gain_db = 3.0;
    // The gain cap read as amplitude (10^(dB/10)) instead of power (10^(dB/20)).
    bool ris_gain_amplitude_reading = false;

    double phi_max() const;
    void validate() const;
};

struct EpisodeConfig {
    int steps_per_episode = 50;
    bool redraw_channels_each_episode = true;
    std::uint64_t seed = 0;
    // Divide each observation block by its link-budget scale so features are
    // O(1); the raw encoding spans several orders of magnitude.
    bool normalize_observations = true;

    void validate() const;
};

Eigen::Index observation_dim(int num_users, int total_elements);
Eigen::Index action_dim(int num_users, int total_elements);

// Observation layout: [Re{w_k^H d_k} for all k | Im{...} for all k |
// Re{w_k^H G_l diag(h_{k->l})} flattened k-major | Im{...} same order].
Eigen::VectorXd encode_observation(const ChannelRealization& channels,
                                   const BeamformingMatrix& beams);

// First K action entries map affinely to [0, p_max]; the remaining 2*N_total
// form (Re, Im) pairs scaled by phi_max and radially projected onto the
// amplitude cap. The output satisfies the power and amplitude constraints for
// any input vector of the right length.
std::pair<PowerAllocation, RisProfile> decode_action(const Eigen::VectorXd& action,
                                                     int num_users,
                                                     const std::vector<int>& elements_per_ris,
                                                     double p_max, double phi_max);

struct StepResult {
    Eigen::VectorXd observation;
    double reward = 0.0;
    bool done = false;
    RateReport info;
};

class UplinkEnvironment {
  public:
    UplinkEnvironment(const ScenarioParams& scenario, const EpisodeConfig& episode);

    Eigen::VectorXd reset();
    StepResult step(const Eigen::VectorXd& action);

    Eigen::Index observation_dim() const;
    Eigen::Index action_dim() const;

    const ScenarioParams& scenario() const { return scenario_; }
    const SystemGeometry& geometry() const { return geometry_; }
    const ChannelRealization& channels() const { return channels_; }
    const BeamformingMatrix& beams() const { return beams_; }
    const PowerAllocation& powers() const { return powers_; }
    const RisProfile& ris_profile() const { return ris_; }
    const Eigen::VectorXd& observation_scale() const { return obs_scale_; }
    int steps_taken() const { return steps_taken_; }

  private:
    Eigen::VectorXd current_observation() const;

    ScenarioParams scenario_;
    EpisodeConfig episode_;
    SystemGeometry geometry_;
    NoisePowers noise_;
    Eigen::VectorXd obs_scale_;
    ChannelRealization channels_;
    BeamformingMatrix beams_;
    PowerAllocation powers_;
    RisProfile ris_;
    std::uint64_t episode_index_ = 0;
    int steps_taken_ = 0;
    bool have_channels_ = false;
    bool awaiting_reset_ = true;
};

}  // namespace risopt
