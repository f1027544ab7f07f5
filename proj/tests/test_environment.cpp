#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "risopt/config.hpp"
#include "risopt/environment.hpp"
#include "risopt/errors.hpp"
#include "risopt/rng.hpp"
#include "risopt/signal.hpp"

using namespace risopt;

namespace {

ScenarioParams small_scenario() {
    ScenarioParams s;
    s.placement.num_antennas = 2;
    s.placement.num_users = 2;
    s.placement.num_ris = 2;
    s.placement.uniform_elements = 3;
    s.fading = FadingParams::defaults(2);
    return s;
}

EpisodeConfig short_episode(std::uint64_t seed, int steps = 5) {
    EpisodeConfig e;
    e.steps_per_episode = steps;
    e.seed = seed;
    return e;
}

}  // namespace

TEST_SUITE_BEGIN("environment");

TEST_CASE("dimension formulas") {
    CHECK(observation_dim(4, 40) == 328);
    CHECK(action_dim(4, 40) == 84);
    CHECK(observation_dim(6, 80) == 972);
    CHECK(action_dim(6, 80) == 166);
    CHECK(observation_dim(8, 400) == 6416);
    CHECK(action_dim(8, 400) == 808);
}

TEST_CASE("observation encoding layout and oracle") {
    PlacementConfig placement;  // defaults: K=4, L=4, N_l=10
    const SystemGeometry g = place_nodes(placement, 1);
    const FadingParams fading = FadingParams::defaults(4);
    const ChannelRealization ch = generate_channels(g, fading, 2);
    const BeamformingMatrix beams = random_beamforming(4, 4, 3);

    const Eigen::VectorXd obs = encode_observation(ch, beams);
    REQUIRE(obs.size() == 328);
    CHECK(obs.allFinite());

    // Direct block: Re in [0, K), Im in [K, 2K).
    for (int k = 0; k < 4; ++k) {
        const std::complex<double> product = beams.w.col(k).dot(ch.direct[k]);
        CHECK(obs(k) == doctest::Approx(product.real()).epsilon(1e-12));
        CHECK(obs(4 + k) == doctest::Approx(product.imag()).epsilon(1e-12));
    }
    // Cascade block: k-major, then l, then element. Re half starts at 2K.
    int offset = 8;
    const int total = 40;
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            const Eigen::RowVectorXcd row =
                beams.w.col(k).adjoint() * ch.ris_to_bs[l] *
                ch.user_to_ris[k][l].asDiagonal();
            for (int n = 0; n < 10; ++n) {
                CHECK(obs(offset) == doctest::Approx(row(n).real()).epsilon(1e-12));
                CHECK(obs(offset + 4 * total) ==
                      doctest::Approx(row(n).imag()).epsilon(1e-12));
                ++offset;
            }
        }
    }

    ChannelRealization zeros = ch;
    for (auto& d : zeros.direct) {
        d.setZero();
    }
    for (auto& per_user : zeros.user_to_ris) {
        for (auto& h : per_user) {
            h.setZero();
        }
    }
    for (auto& gmat : zeros.ris_to_bs) {
        gmat.setZero();
    }
    CHECK(encode_observation(zeros, beams).norm() == 0.0);
}

TEST_CASE("action decoding honors the box and amplitude constraints") {
    const double p_max = kDefaultPMaxWatts;
    const double phi_max = std::pow(10.0, 3.0 / 20.0);
    const std::vector<int> elements = {2, 3};
    const int total = 5;

    Eigen::VectorXd action = Eigen::VectorXd::Zero(2 + 2 * total);
    action(0) = 1.0;
    action(1) = -1.0;
    auto [powers, ris] = decode_action(action, 2, elements, p_max, phi_max);
    CHECK(powers.p(0) == doctest::Approx(0.1995).epsilon(1e-3));
    CHECK(powers.p(0) == p_max);
    CHECK(powers.p(1) == 0.0);
    CHECK(ris.phi[0].norm() == 0.0);
    CHECK(ris.phi[1].norm() == 0.0);

    // An out-of-box raw pair lands on the amplitude cap along the same ray.
    action(2) = 2.0;
    action(2 + total) = 0.0;
    auto [p2, ris2] = decode_action(action, 2, elements, p_max, phi_max);
    CHECK(std::abs(ris2.phi[0](0) - std::complex<double>(phi_max, 0.0)) < 1e-12);

    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(decode_action(wrong, 2, elements, p_max, phi_max), InvalidActionError);

    Rng rng(9);
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::VectorXd a(2 + 2 * total);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a(i) = rng.uniform(-1.0, 1.0);
        }
        auto [p, r] = decode_action(a, 2, elements, p_max, phi_max);
        p.validate();
        r.validate();
    }
}

TEST_CASE("reset determinism and initial state") {
    UplinkEnvironment env(small_scenario(), short_episode(7));
    const Eigen::VectorXd first = env.reset();
    const Eigen::VectorXd second = env.reset();
    CHECK((first - second).norm() == 0.0);

    UplinkEnvironment env2(small_scenario(), short_episode(7));
    CHECK((env2.reset() - first).norm() == 0.0);

    for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(env.beams().w.col(k).norm() - 1.0) < 1e-10);
        CHECK(env.powers().p(k) == doctest::Approx(env.scenario().p_max / 2.0));
    }
    for (const auto& phi : env.ris_profile().phi) {
        CHECK(phi.norm() == 0.0);
    }
}

TEST_CASE("channel redraw policy across episodes") {
    EpisodeConfig redraw = short_episode(13, 2);
    UplinkEnvironment env(small_scenario(), redraw);
    env.reset();
    const Eigen::VectorXcd episode1 = env.channels().direct[0];
    Eigen::VectorXd action = Eigen::VectorXd::Zero(env.action_dim());
    env.step(action);
    env.step(action);
    env.reset();
    const Eigen::VectorXcd episode2 = env.channels().direct[0];
    CHECK((episode1 - episode2).norm() > 0.0);

    EpisodeConfig frozen = short_episode(13, 2);
    frozen.redraw_channels_each_episode = false;
    UplinkEnvironment env_frozen(small_scenario(), frozen);
    env_frozen.reset();
    const Eigen::VectorXcd frozen1 = env_frozen.channels().direct[0];
    env_frozen.step(action);
    env_frozen.step(action);
    env_frozen.reset();
    CHECK((env_frozen.channels().direct[0] - frozen1).norm() == 0.0);
}

TEST_CASE("step rewards, termination and state guards") {
    ScenarioParams scenario = small_scenario();
    UplinkEnvironment env(scenario, short_episode(21, 50));

    UplinkEnvironment unreset(scenario, short_episode(21, 50));
    Eigen::VectorXd some_action = Eigen::VectorXd::Zero(unreset.action_dim());
    CHECK_THROWS_AS(unreset.step(some_action), InvalidStateError);

    env.reset();
    Eigen::VectorXd silent = Eigen::VectorXd::Zero(env.action_dim());
    silent.head(2).setConstant(-1.0);  // both users at zero power
    const StepResult quiet = env.step(silent);
    CHECK(quiet.reward == 0.0);
    CHECK(quiet.info.min_rate == 0.0);

    Rng rng(22);
    for (int step = 1; step < 50; ++step) {
        Eigen::VectorXd a(env.action_dim());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a(i) = rng.uniform(-1.0, 1.0);
        }
        const StepResult result = env.step(a);
        CHECK(result.reward == result.info.min_rate);
        CHECK(result.reward >= 0.0);
        CHECK(result.observation.allFinite());
        CHECK(result.done == (step == 49));
    }
    CHECK_THROWS_AS(env.step(silent), InvalidStateError);
}

TEST_CASE("single-user reward recomputes from the analytic sinr") {
    ScenarioParams scenario;
    scenario.placement.num_antennas = 2;
    scenario.placement.num_users = 1;
    scenario.placement.num_ris = 1;
    scenario.placement.uniform_elements = 2;
    scenario.fading = FadingParams::defaults(1);

    UplinkEnvironment env(scenario, short_episode(33));
    env.reset();
    Eigen::VectorXd action(env.action_dim());
    action << 0.5, 0.3, -0.2, 0.8, 0.1;
    const StepResult result = env.step(action);

    const NoisePowers noise = NoisePowers::from(scenario.fading);
    const double gamma = sinr(env.channels(), env.ris_profile(), env.powers(), env.beams(),
                              noise, 0);
    CHECK(result.reward == doctest::Approx(std::log2(1.0 + gamma)).epsilon(1e-10));
}

TEST_CASE("environment is a deterministic function of seed and actions") {
    const ScenarioParams scenario = small_scenario();
    UplinkEnvironment env_a(scenario, short_episode(44, 10));
    UplinkEnvironment env_b(scenario, short_episode(44, 10));
    env_a.reset();
    env_b.reset();

    Rng rng(45);
    for (int step = 0; step < 10; ++step) {
        Eigen::VectorXd a(env_a.action_dim());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a(i) = rng.uniform(-1.0, 1.0);
        }
        const StepResult ra = env_a.step(a);
        const StepResult rb = env_b.step(a);
        CHECK(ra.reward == rb.reward);
        CHECK((ra.observation - rb.observation).norm() == 0.0);
    }
}

TEST_CASE("observation normalization yields order-one features") {
    ScenarioParams scenario;  // Table II shape
    EpisodeConfig episode = short_episode(55);
    UplinkEnvironment env(scenario, episode);
    const Eigen::VectorXd obs = env.reset();
    CHECK(obs.cwiseAbs().maxCoeff() < 100.0);
    CHECK(obs.cwiseAbs().maxCoeff() > 1e-4);

    EpisodeConfig raw = episode;
    raw.normalize_observations = false;
    UplinkEnvironment env_raw(scenario, raw);
    const Eigen::VectorXd obs_raw = env_raw.reset();
    const Eigen::VectorXd rescaled = obs_raw.cwiseQuotient(env.observation_scale());
    CHECK((rescaled - obs).norm() < 1e-12 * obs.norm());
}

TEST_CASE("amplitude cap follows the configured gain reading") {
    ScenarioParams scenario;
    CHECK(scenario.phi_max() == doctest::Approx(std::pow(10.0, 3.0 / 20.0)).epsilon(1e-12));
    scenario.ris_gain_amplitude_reading = true;
    CHECK(scenario.phi_max() == doctest::Approx(std::pow(10.0, 3.0 / 10.0)).epsilon(1e-12));
}

TEST_CASE("scenario validation rejects nonphysical bounds") {
    ScenarioParams scenario = small_scenario();
    scenario.p_max = 0.0;
    CHECK_THROWS_AS(scenario.validate(), InvalidParameterError);
    scenario = small_scenario();
    scenario.fading.sigma_bs_sq = -1.0;
    CHECK_THROWS_AS(scenario.validate(), InvalidParameterError);
    EpisodeConfig episode;
    episode.steps_per_episode = 0;
    CHECK_THROWS_AS(episode.validate(), InvalidParameterError);
}

TEST_SUITE_END();
