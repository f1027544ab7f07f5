#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/errors.hpp"
#include "risopt/rng.hpp"
#include "risopt/signal.hpp"

using namespace risopt;

namespace {

struct Instance {
    ChannelRealization channels;
    RisProfile ris;
    PowerAllocation powers;
    NoisePowers noise;
};

Instance make_instance(int m, int k, int l, int n, std::uint64_t seed) {
    PlacementConfig placement;
    placement.num_antennas = m;
    placement.num_users = k;
    placement.num_ris = l;
    placement.uniform_elements = n;
    placement.random_angles = true;
    const SystemGeometry geometry = place_nodes(placement, mix_seed(seed, 1));
    const FadingParams fading = FadingParams::defaults(l);

    Instance inst;
    inst.channels = generate_channels(geometry, fading, mix_seed(seed, 2));
    inst.noise = NoisePowers::from(fading);

    Rng rng(mix_seed(seed, 3));
    inst.powers.p_max = 0.2;
    inst.powers.p.resize(k);
    for (int i = 0; i < k; ++i) {
        inst.powers.p(i) = 0.2 * rng.uniform(0.1, 1.0);
    }
    const double phi_max = std::pow(10.0, 3.0 / 20.0);
    inst.ris = RisProfile::zeros(geometry.elements_per_ris, phi_max);
    for (auto& phi : inst.ris.phi) {
        for (Eigen::Index i = 0; i < phi.size(); ++i) {
            phi(i) = std::polar(phi_max * std::sqrt(rng.uniform()),
                                rng.uniform(0.0, 2.0 * std::numbers::pi));
        }
    }
    return inst;
}

// One user, no surfaces, unit noise; the direct channel is [1, 1].
Instance matched_filter_instance() {
    Instance inst;
    inst.channels.direct = {Eigen::VectorXcd::Ones(2)};
    inst.channels.user_to_ris = {{}};
    inst.powers.p = Eigen::VectorXd::Ones(1);
    inst.powers.p_max = 1.0;
    inst.noise.bs_sq = 1.0;
    return inst;
}

}  // namespace

TEST_SUITE_BEGIN("signal");

TEST_CASE("equivalent channel reduces to the direct channel at zero coefficients") {
    const Instance inst = make_instance(4, 2, 2, 3, 10);
    RisProfile off = inst.ris;
    for (auto& phi : off.phi) {
        phi.setZero();
    }
    for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXcd h = equivalent_channel(inst.channels, off, k);
        CHECK((h - inst.channels.direct[k]).norm() == 0.0);
    }
}

TEST_CASE("equivalent channel matches the scalar expansion in the 1x1 case") {
    ChannelRealization ch;
    const std::complex<double> d{0.3, -0.2};
    const std::complex<double> g{1.5, 0.5};
    const std::complex<double> h{-0.7, 0.1};
    const std::complex<double> c{0.9, 1.1};
    ch.direct = {Eigen::VectorXcd::Constant(1, d)};
    ch.user_to_ris = {{Eigen::VectorXcd::Constant(1, h)}};
    ch.ris_to_bs = {Eigen::MatrixXcd::Constant(1, 1, g)};
    RisProfile ris;
    ris.phi = {Eigen::VectorXcd::Constant(1, c)};
    ris.phi_max = {10.0};

    const Eigen::VectorXcd eqv = equivalent_channel(ch, ris, 0);
    CHECK(std::abs(eqv(0) - (d + g * c * h)) < 1e-15);
}

TEST_CASE("equivalent channel agrees with a naive triple loop") {
    const Instance inst = make_instance(4, 2, 2, 3, 11);
    for (int k = 0; k < 2; ++k) {
        Eigen::VectorXcd expected = inst.channels.direct[k];
        for (int l = 0; l < 2; ++l) {
            for (int n = 0; n < 3; ++n) {
                expected += inst.channels.ris_to_bs[l].col(n) * inst.ris.phi[l](n) *
                            inst.channels.user_to_ris[k][l](n);
            }
        }
        const Eigen::VectorXcd actual = equivalent_channel(inst.channels, inst.ris, k);
        CHECK((actual - expected).norm() < 1e-12);
    }
}

TEST_CASE("interference covariance degenerate forms") {
    const Instance inst = make_instance(3, 1, 1, 4, 12);

    RisProfile off = inst.ris;
    off.phi[0].setZero();
    const Eigen::MatrixXcd lambda_off =
        interference_covariance(inst.channels, off, inst.powers, inst.noise, 0);
    const Eigen::MatrixXcd expected_off =
        inst.noise.bs_sq * Eigen::MatrixXcd::Identity(3, 3);
    CHECK((lambda_off - expected_off).norm() < 1e-25);

    RisProfile unit = inst.ris;
    for (Eigen::Index i = 0; i < 4; ++i) {
        unit.phi[0](i) = std::polar(1.0, 0.4 * i);
    }
    const Eigen::MatrixXcd lambda_unit =
        interference_covariance(inst.channels, unit, inst.powers, inst.noise, 0);
    const Eigen::MatrixXcd& g = inst.channels.ris_to_bs[0];
    const Eigen::MatrixXcd expected_unit =
        inst.noise.ris_sq(0) * g * g.adjoint() +
        inst.noise.bs_sq * Eigen::MatrixXcd::Identity(3, 3);
    CHECK((lambda_unit - expected_unit).norm() < 1e-18);
}

TEST_CASE("interference covariance is Hermitian with noise-floor eigenvalues") {
    const Instance inst = make_instance(4, 3, 2, 4, 13);
    for (int k = 0; k < 3; ++k) {
        const Eigen::MatrixXcd lambda =
            interference_covariance(inst.channels, inst.ris, inst.powers, inst.noise, k);
        CHECK((lambda - lambda.adjoint()).norm() < 1e-12 * lambda.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(lambda);
        CHECK(eig.eigenvalues().minCoeff() >= inst.noise.bs_sq * (1.0 - 1e-10));
    }
}

TEST_CASE("single-user beamformer is the matched filter") {
    const Instance inst = make_instance(4, 1, 2, 3, 14);
    RisProfile off = inst.ris;
    for (auto& phi : off.phi) {
        phi.setZero();
    }
    const BeamformingMatrix beams =
        optimal_beamforming(inst.channels, off, inst.powers, inst.noise);
    const Eigen::VectorXcd expected = inst.channels.direct[0].normalized();
    CHECK((beams.w.col(0) - expected).norm() < 1e-12);
}

TEST_CASE("optimal beamformer matches the generalized eigenvector and dominates") {
    Rng rng(777);
    for (int trial = 0; trial < 5; ++trial) {
        const Instance inst = make_instance(4, 3, 2, 4, 20 + trial);
        const BeamformingMatrix beams =
            optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);

        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(beams.w.col(k).norm() - 1.0) < 1e-12);

            const Eigen::VectorXcd h = equivalent_channel(inst.channels, inst.ris, k);
            const Eigen::MatrixXcd lambda =
                interference_covariance(inst.channels, inst.ris, inst.powers, inst.noise, k);
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
                inst.powers.p(k) * h * h.adjoint(), lambda);
            Eigen::VectorXcd principal = ges.eigenvectors().col(3).normalized();
            CHECK(std::abs(principal.dot(beams.w.col(k))) >= 1.0 - 1e-8);

            const double gamma_opt =
                sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, k);
            BeamformingMatrix candidate = beams;
            for (int r = 0; r < 200; ++r) {
                Eigen::VectorXcd w(4);
                for (int i = 0; i < 4; ++i) {
                    w(i) = rng.complex_normal();
                }
                candidate.w.col(k) = w.normalized();
                const double gamma =
                    sinr(inst.channels, inst.ris, inst.powers, candidate, inst.noise, k);
                CHECK(gamma <= gamma_opt * (1.0 + 1e-10));
            }
            candidate.w.col(k) = beams.w.col(k);
        }
    }
}

TEST_CASE("random beamformers are unit norm, reproducible and isotropic") {
    const BeamformingMatrix a = random_beamforming(4, 3, 55);
    const BeamformingMatrix b = random_beamforming(4, 3, 55);
    CHECK((a.w - b.w).norm() == 0.0);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(a.w.col(k).norm() - 1.0) < 1e-12);
    }

    double first_component_power = 0.0;
    constexpr int kDraws = 10000;
    for (int draw = 0; draw < kDraws; ++draw) {
        const BeamformingMatrix w = random_beamforming(4, 1, mix_seed(99, draw));
        first_component_power += std::norm(w.w(0, 0));
    }
    CHECK(first_component_power / kDraws == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("sinr closed forms") {
    const Instance mf = matched_filter_instance();
    BeamformingMatrix beams;
    beams.w = mf.channels.direct[0].normalized();

    CHECK(sinr(mf.channels, mf.ris, mf.powers, beams, mf.noise, 0) ==
          doctest::Approx(2.0).epsilon(1e-12));

    PowerAllocation silent = mf.powers;
    silent.p(0) = 0.0;
    CHECK(sinr(mf.channels, mf.ris, silent, beams, mf.noise, 0) == 0.0);

    BeamformingMatrix zero;
    zero.w = Eigen::MatrixXcd::Zero(2, 1);
    CHECK_THROWS_AS(sinr(mf.channels, mf.ris, mf.powers, zero, mf.noise, 0),
                    InvalidInputError);
}

TEST_CASE("sinr is invariant to beamformer scaling and monotone in power") {
    const Instance inst = make_instance(4, 3, 2, 4, 30);
    const BeamformingMatrix beams =
        optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);
    Rng rng(31);
    for (int k = 0; k < 3; ++k) {
        const double base = sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, k);

        BeamformingMatrix scaled = beams;
        const std::complex<double> c =
            std::polar(rng.uniform(0.1, 3.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
        scaled.w.col(k) *= c;
        const double gamma_scaled =
            sinr(inst.channels, inst.ris, inst.powers, scaled, inst.noise, k);
        CHECK(gamma_scaled == doctest::Approx(base).epsilon(1e-12));

        PowerAllocation boosted = inst.powers;
        boosted.p(k) *= 1.5;
        boosted.p_max *= 1.5;
        const double gamma_boosted =
            sinr(inst.channels, inst.ris, boosted, beams, inst.noise, k);
        CHECK(gamma_boosted >= base);
    }
}

TEST_CASE("monte carlo estimate agrees with the analytic sinr") {
    const Instance inst = make_instance(4, 3, 2, 4, 40);
    const BeamformingMatrix beams =
        optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);
    const double analytic = sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, 1);
    const McSinrEstimate mc = monte_carlo_sinr(inst.channels, inst.ris, inst.powers, beams,
                                               inst.noise, 1, 1000000, 41);
    CHECK(!mc.overflow);
    CHECK(mc.value == doctest::Approx(analytic).epsilon(0.02));

    PowerAllocation silent = inst.powers;
    silent.p(1) = 0.0;
    const McSinrEstimate zero = monte_carlo_sinr(inst.channels, inst.ris, silent, beams,
                                                 inst.noise, 1, 10000, 42);
    CHECK(zero.value == 0.0);
}

TEST_CASE("noiseless monte carlo trips the overflow guard") {
    const Instance mf = matched_filter_instance();
    NoisePowers no_noise;
    no_noise.bs_sq = 0.0;
    BeamformingMatrix beams;
    beams.w = mf.channels.direct[0].normalized();

    const McSinrEstimate mc =
        monte_carlo_sinr(mf.channels, mf.ris, mf.powers, beams, no_noise, 0, 1000, 43);
    CHECK(mc.overflow);
    CHECK(mc.value == kSinrOverflowCap);
}

TEST_CASE("rate report log arithmetic") {
    ChannelRealization ch;
    ch.direct = {Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Zero(2)};
    ch.direct[0](0) = 1.0;
    ch.direct[1](1) = std::sqrt(3.0);
    ch.user_to_ris = {{}, {}};
    RisProfile ris;
    PowerAllocation powers;
    powers.p = Eigen::VectorXd::Ones(2);
    powers.p_max = 1.0;
    NoisePowers noise;
    noise.bs_sq = 1.0;
    BeamformingMatrix beams;
    beams.w = Eigen::MatrixXcd::Identity(2, 2);

    const RateReport report = rate_report(ch, ris, powers, beams, noise);
    CHECK(report.sinr(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.sinr(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(report.rates(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.rates(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.min_rate == doctest::Approx(1.0).epsilon(1e-12));

    PowerAllocation silent = powers;
    silent.p.setZero();
    const RateReport quiet = rate_report(ch, ris, silent, beams, noise);
    CHECK(quiet.rates.maxCoeff() == 0.0);
    CHECK(quiet.min_rate == 0.0);
}

TEST_CASE("optimal beamforming dominates random beamforming on min rate") {
    for (int trial = 0; trial < 10; ++trial) {
        const Instance inst = make_instance(4, 3, 2, 4, 60 + trial);
        const BeamformingMatrix opt =
            optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);
        const double opt_min =
            rate_report(inst.channels, inst.ris, inst.powers, opt, inst.noise).min_rate;
        for (int r = 0; r < 20; ++r) {
            const BeamformingMatrix rnd = random_beamforming(4, 3, mix_seed(61, trial, r));
            const double rnd_min =
                rate_report(inst.channels, inst.ris, inst.powers, rnd, inst.noise).min_rate;
            CHECK(opt_min >= rnd_min * (1.0 - 1e-10));
        }
    }
}

TEST_SUITE_END();
