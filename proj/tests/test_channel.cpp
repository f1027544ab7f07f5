#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "risopt/channel.hpp"
#include "risopt/errors.hpp"
#include "risopt/fading.hpp"
#include "risopt/geometry.hpp"
#include "risopt/rng.hpp"

using namespace risopt;

namespace {

SystemGeometry unit_distance_geometry(int m, int n) {
    // Equilateral layout so every link distance is exactly 1 m.
    SystemGeometry g;
    g.bs_position = {0.0, 0.0, 0.0};
    g.ris_positions = {{1.0, 0.0, 0.0}};
    g.user_positions = {{0.5, std::sqrt(3.0) / 2.0, 0.0}};
    g.num_antennas = m;
    g.elements_per_ris = {n};
    return g;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("placement puts surfaces and users on the configured circles") {
    PlacementConfig config;
    const SystemGeometry g = place_nodes(config, 0);

    CHECK(g.bs_position.isApprox(Eigen::Vector3d(0.0, 0.0, 5.0)));
    REQUIRE(g.num_ris() == 4);
    REQUIRE(g.num_users() == 4);
    for (int l = 0; l < 4; ++l) {
        const Eigen::Vector2d horizontal = g.ris_positions[l].head<2>();
        CHECK(horizontal.norm() == doctest::Approx(12.0).epsilon(1e-12));
        CHECK(g.ris_positions[l].z() == doctest::Approx(5.0));
    }
    // Even spacing: consecutive surfaces 90 degrees apart.
    for (int l = 0; l < 4; ++l) {
        const Eigen::Vector2d a = g.ris_positions[l].head<2>().normalized();
        const Eigen::Vector2d b = g.ris_positions[(l + 1) % 4].head<2>().normalized();
        CHECK(a.dot(b) == doctest::Approx(0.0).epsilon(1e-12));
    }
    for (int k = 0; k < 4; ++k) {
        CHECK(g.user_positions[k].head<2>().norm() == doctest::Approx(6.0));
        CHECK(g.user_positions[k].z() == doctest::Approx(1.5));
    }
}

TEST_CASE("single user lands at the configured horizontal distance") {
    PlacementConfig config;
    config.num_users = 1;
    const SystemGeometry g = place_nodes(config, 3);
    REQUIRE(g.num_users() == 1);
    CHECK(g.user_positions[0].head<2>().norm() == doctest::Approx(6.0));
}

TEST_CASE("degenerate radii are rejected") {
    PlacementConfig config;
    config.ris_radius = 0.0;
    CHECK_THROWS_AS(place_nodes(config, 0), InvalidGeometryError);
    config.ris_radius = 12.0;
    config.user_radius = -1.0;
    CHECK_THROWS_AS(place_nodes(config, 0), InvalidGeometryError);
}

TEST_CASE("random placement is deterministic in the seed") {
    PlacementConfig config;
    config.random_angles = true;
    const SystemGeometry a = place_nodes(config, 42);
    const SystemGeometry b = place_nodes(config, 42);
    const SystemGeometry c = place_nodes(config, 43);
    for (int l = 0; l < a.num_ris(); ++l) {
        CHECK((a.ris_positions[l] - b.ris_positions[l]).norm() == 0.0);
    }
    bool any_differs = false;
    for (int l = 0; l < a.num_ris(); ++l) {
        any_differs = any_differs || (a.ris_positions[l] - c.ris_positions[l]).norm() > 0.0;
    }
    CHECK(any_differs);
}

TEST_CASE("path loss factor") {
    CHECK(path_loss_factor(1.0, 1.0, 2.2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(path_loss_factor(1.0, 1e-3, 3.7) == doctest::Approx(std::sqrt(1e-3)).epsilon(1e-15));
    CHECK(path_loss_factor(10.0, 1.0, 2.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(path_loss_factor(0.0, 1.0, 2.0), InvalidGeometryError);
    CHECK_THROWS_AS(path_loss_factor(-2.0, 1.0, 2.0), InvalidGeometryError);
}

TEST_CASE("rician split conserves power") {
    auto [a0, b0] = rician_components(0.0);
    CHECK(a0 == 0.0);
    CHECK(b0 == 1.0);

    auto [a1, b1] = rician_components(1.0);
    CHECK(a1 == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(b1 == doctest::Approx(0.70711).epsilon(1e-4));

    auto [ainf, binf] = rician_components(1e15);
    CHECK(ainf == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(binf == doctest::Approx(0.0).epsilon(1e-7));

    for (double k : {0.0, 0.3, 2.0, 17.5}) {
        auto [alpha, beta] = rician_components(k);
        CHECK(alpha * alpha + beta * beta == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(rician_components(-0.1), InvalidParameterError);
}

TEST_CASE("steering vector entries are unit modulus") {
    const Eigen::VectorXcd a = ula_steering(8, 0.7);
    REQUIRE(a.size() == 8);
    CHECK(std::abs(a(0) - std::complex<double>(1.0, 0.0)) < 1e-15);
    for (int n = 0; n < 8; ++n) {
        CHECK(std::abs(std::abs(a(n)) - 1.0) < 1e-14);
        const double expected_phase = std::numbers::pi * n * std::cos(0.7);
        CHECK(std::arg(a(n)) ==
              doctest::Approx(std::arg(std::polar(1.0, expected_phase))).epsilon(1e-12));
    }
}

TEST_CASE("channels are reproducible and dimensioned by the geometry") {
    PlacementConfig config;
    config.num_antennas = 3;
    config.num_users = 2;
    config.num_ris = 2;
    config.elements_per_ris = {4, 7};
    const SystemGeometry g = place_nodes(config, 5);
    const FadingParams params = FadingParams::defaults(2);

    const ChannelRealization a = generate_channels(g, params, 99);
    const ChannelRealization b = generate_channels(g, params, 99);
    const ChannelRealization c = generate_channels(g, params, 100);

    a.validate(g);
    REQUIRE(a.num_users() == 2);
    REQUIRE(a.num_ris() == 2);
    CHECK(a.direct[0].size() == 3);
    CHECK(a.user_to_ris[1][0].size() == 4);
    CHECK(a.user_to_ris[1][1].size() == 7);
    CHECK(a.ris_to_bs[1].rows() == 3);
    CHECK(a.ris_to_bs[1].cols() == 7);

    for (int k = 0; k < 2; ++k) {
        CHECK((a.direct[k] - b.direct[k]).norm() == 0.0);
        CHECK((a.direct[k] - c.direct[k]).norm() > 0.0);
        for (int l = 0; l < 2; ++l) {
            CHECK((a.user_to_ris[k][l] - b.user_to_ris[k][l]).norm() == 0.0);
        }
    }
    CHECK((a.ris_to_bs[0] - b.ris_to_bs[0]).norm() == 0.0);
}

TEST_CASE("pure line of sight pins channel magnitudes to the path loss") {
    const SystemGeometry g = unit_distance_geometry(3, 4);
    FadingParams params = FadingParams::defaults(1);
    params.rician_k = 4e16;  // beta ~ 5e-9, so |entry| tracks the path loss to ~1e-8

    const ChannelRealization ch = generate_channels(g, params, 17);
    const double pl = path_loss_factor(1.0, params.eta, params.zeta);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(ch.direct[0](i)) == doctest::Approx(pl).epsilon(1e-6));
    }
    for (int n = 0; n < 4; ++n) {
        CHECK(std::abs(ch.user_to_ris[0][0](n)) == doctest::Approx(pl).epsilon(1e-6));
    }
}

TEST_CASE("pure scattering at unit distance gives unit-variance entries") {
    SystemGeometry g = unit_distance_geometry(2, 2);
    FadingParams params = FadingParams::defaults(1);
    params.eta = 1.0;
    params.rician_k = 0.0;

    double sum_sq = 0.0;
    long count = 0;
    for (int draw = 0; draw < 20000; ++draw) {
        const ChannelRealization ch = generate_channels(g, params, mix_seed(1234, draw));
        sum_sq += ch.direct[0].squaredNorm();
        count += ch.direct[0].size();
    }
    CHECK(sum_sq / count == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("fading parameter validation") {
    FadingParams params = FadingParams::defaults(2);
    params.validate(2);

    FadingParams bad_eta = params;
    bad_eta.eta = 0.0;
    CHECK_THROWS_AS(bad_eta.validate(2), InvalidParameterError);

    FadingParams bad_sigma = params;
    bad_sigma.sigma_ris_sq = Eigen::VectorXd::Constant(3, 1e-11);
    CHECK_THROWS_AS(bad_sigma.validate(2), InvalidParameterError);

    FadingParams bad_k = params;
    bad_k.rician_k = -1.0;
    CHECK_THROWS_AS(bad_k.validate(2), InvalidParameterError);
}

TEST_CASE("rng streams are stable and decorrelated") {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));

    Rng c(123);
    double mean = 0.0;
    double var = 0.0;
    constexpr int kDraws = 200000;
    for (int i = 0; i < kDraws; ++i) {
        const double x = c.normal();
        mean += x;
        var += x * x;
    }
    mean /= kDraws;
    var = var / kDraws - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));

    Rng d(5);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = d.uniform_int(13);
        CHECK(v < 13);
    }
}

TEST_SUITE_END();
