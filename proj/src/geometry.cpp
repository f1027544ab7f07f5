#include "risopt/geometry.hpp"

#include <cmath>
#include <string>

#include "risopt/errors.hpp"
#include "risopt/rng.hpp"

namespace risopt {

std::vector<int> PlacementConfig::resolved_elements() const {
    if (!elements_per_ris.empty()) {
        return elements_per_ris;
    }
    return std::vector<int>(static_cast<std::size_t>(num_ris), uniform_elements);
}

int SystemGeometry::total_elements() const {
    int total = 0;
    for (int n : elements_per_ris) {
        total += n;
    }
    return total;
}

double SystemGeometry::user_bs_distance(int k) const {
    return (user_positions.at(k) - bs_position).norm();
}

double SystemGeometry::user_ris_distance(int k, int l) const {
    return (user_positions.at(k) - ris_positions.at(l)).norm();
}

double SystemGeometry::ris_bs_distance(int l) const {
    return (ris_positions.at(l) - bs_position).norm();
}

void SystemGeometry::validate() const {
    if (num_antennas < 1) {
        throw InvalidGeometryError("geometry: antenna count must be >= 1");
    }
    if (user_positions.empty() || ris_positions.empty()) {
        throw InvalidGeometryError("geometry: need at least one user and one surface");
    }
    if (elements_per_ris.size() != ris_positions.size()) {
        throw InvalidGeometryError("geometry: element counts do not match surface count");
    }
    for (int n : elements_per_ris) {
        if (n < 1) {
            throw InvalidGeometryError("geometry: every surface needs >= 1 element");
        }
    }
    const int num_k = num_users();
    const int num_l = num_ris();
    for (int k = 0; k < num_k; ++k) {
        if (user_bs_distance(k) <= 0.0) {
            throw InvalidGeometryError("geometry: user " + std::to_string(k) +
                                       " coincides with the BS");
        }
        for (int l = 0; l < num_l; ++l) {
            if (user_ris_distance(k, l) <= 0.0) {
                throw InvalidGeometryError("geometry: user/surface positions coincide");
            }
        }
    }
    for (int l = 0; l < num_l; ++l) {
        if (ris_bs_distance(l) <= 0.0) {
            throw InvalidGeometryError("geometry: surface " + std::to_string(l) +
                                       " coincides with the BS");
        }
    }
}

SystemGeometry place_nodes(const PlacementConfig& config, std::uint64_t seed) {
    if (config.num_users < 1 || config.num_ris < 1 || config.num_antennas < 1) {
        throw InvalidGeometryError("place_nodes: counts must be >= 1");
    }
    if (config.ris_radius <= 0.0 || config.user_radius <= 0.0) {
        throw InvalidGeometryError("place_nodes: circle radii must be > 0");
    }
    const std::vector<int> elements = config.resolved_elements();
    if (static_cast<int>(elements.size()) != config.num_ris) {
        throw InvalidGeometryError("place_nodes: elements_per_ris length != num_ris");
    }

    Rng rng(mix_seed(seed, 0x67656f6dULL));  // "geom"
    auto circle_angle = [&](int index, int count) {
        if (config.random_angles) {
            return rng.uniform(0.0, 2.0 * M_PI);
        }
        return 2.0 * M_PI * index / count;
    };

    SystemGeometry geometry;
    geometry.bs_position = config.bs_position;
    geometry.num_antennas = config.num_antennas;
    geometry.elements_per_ris = elements;

    geometry.ris_positions.reserve(config.num_ris);
    for (int l = 0; l < config.num_ris; ++l) {
        const double angle = circle_angle(l, config.num_ris);
        geometry.ris_positions.emplace_back(
            config.bs_position.x() + config.ris_radius * std::cos(angle),
            config.bs_position.y() + config.ris_radius * std::sin(angle), config.ris_height);
    }
    geometry.user_positions.reserve(config.num_users);
    for (int k = 0; k < config.num_users; ++k) {
        const double angle = circle_angle(k, config.num_users);
        geometry.user_positions.emplace_back(
            config.bs_position.x() + config.user_radius * std::cos(angle),
            config.bs_position.y() + config.user_radius * std::sin(angle), config.user_height);
    }

    geometry.validate();
    return geometry;
}

}  // namespace risopt
