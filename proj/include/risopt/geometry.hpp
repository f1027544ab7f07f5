#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace risopt {

// Scenario layout knobs. Radii are horizontal distances from the BS; the
// defaults put four surfaces on a 12 m circle and four users on a 6 m circle.
struct PlacementConfig {
    Eigen::Vector3d bs_position{0.0, 0.0, 5.0};
    int num_antennas = 4;  // M
    int num_users = 4;     // K
    int num_ris = 4;       // L
    // Per-surface element counts; when empty every surface gets
    // `uniform_elements` elements.
    std::vector<int> elements_per_ris;
    int uniform_elements = 10;
    double ris_radius = 12.0;
    double user_radius = 6.0;
    double ris_height = 5.0;
    double user_height = 1.5;
    // Evenly spaced circle angles by default; uniform-random when true.
    bool random_angles = false;

    std::vector<int> resolved_elements() const;
};

struct SystemGeometry {
    Eigen::Vector3d bs_position;
    std::vector<Eigen::Vector3d> ris_positions;
    std::vector<Eigen::Vector3d> user_positions;
    int num_antennas = 0;               // M
    std::vector<int> elements_per_ris;  // N_l

    int num_users() const { return static_cast<int>(user_positions.size()); }
    int num_ris() const { return static_cast<int>(ris_positions.size()); }
    int total_elements() const;

    double user_bs_distance(int k) const;        // z_{d,k}
    double user_ris_distance(int k, int l) const;  // z_{k->l}
    double ris_bs_distance(int l) const;           // z_l

    // Throws InvalidGeometryError when any count is < 1 or any link distance
    // is not strictly positive.
    void validate() const;
};

// Places the BS, surfaces and users. Deterministic given the seed; the seed
// only matters when PlacementConfig::random_angles is set.
SystemGeometry place_nodes(const PlacementConfig& config, std::uint64_t seed);

}  // namespace risopt
