#include "risopt/checks.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "risopt/agents/networks.hpp"
#include "risopt/config.hpp"
#include "risopt/environment.hpp"
#include "risopt/harness.hpp"
#include "risopt/metrics.hpp"
#include "risopt/nn/squashed_gaussian.hpp"
#include "risopt/replay_buffer.hpp"
#include "risopt/rng.hpp"

namespace risopt {

namespace {

class Timer {
  public:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format_sci(double value) {
    std::ostringstream out;
    out.precision(3);
    out << value;
    return out.str();
}

struct Instance {
    SystemGeometry geometry;
    ChannelRealization channels;
    PowerAllocation powers;
    RisProfile ris;
    NoisePowers noise;
};

Instance random_instance(int num_antennas, int num_users, int num_ris, int elements,
                         std::uint64_t seed) {
    PlacementConfig placement;
    placement.num_antennas = num_antennas;
    placement.num_users = num_users;
    placement.num_ris = num_ris;
    placement.uniform_elements = elements;
    placement.random_angles = true;

    Instance inst;
    inst.geometry = place_nodes(placement, mix_seed(seed, 1));
    const FadingParams fading = FadingParams::defaults(num_ris);
    inst.channels = generate_channels(inst.geometry, fading, mix_seed(seed, 2));
    inst.noise = NoisePowers::from(fading);

    Rng rng(mix_seed(seed, 3));
    const double p_max = kDefaultPMaxWatts;
    inst.powers.p_max = p_max;
    inst.powers.p.resize(num_users);
    for (int k = 0; k < num_users; ++k) {
        inst.powers.p(k) = p_max * rng.uniform(0.2, 1.0);
    }
    const double phi_max = std::pow(10.0, 3.0 / 20.0);
    inst.ris = RisProfile::zeros(inst.geometry.elements_per_ris, phi_max);
    for (auto& phi : inst.ris.phi) {
        for (Eigen::Index n = 0; n < phi.size(); ++n) {
            phi(n) = std::polar(phi_max * std::sqrt(rng.uniform()),
                                rng.uniform(0.0, 2.0 * std::numbers::pi));
        }
    }
    return inst;
}

Eigen::VectorXcd random_unit_vector(int size, Rng& rng) {
    Eigen::VectorXcd v(size);
    for (int i = 0; i < size; ++i) {
        v(i) = rng.complex_normal();
    }
    v.normalize();
    return v;
}

}  // namespace

CheckResult check_beamforming_optimality(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"beamforming-optimality", false, "", 0.0};
    constexpr int kInstances = 100;
    constexpr int kRandomBeams = 1000;
    double min_overlap = 1.0;
    long violations = 0;
    long comparisons = 0;

    for (int i = 0; i < kInstances; ++i) {
        const Instance inst = random_instance(4, 3, 2, 4, mix_seed(seed, 0xb0, i));
        const BeamformingMatrix beams =
            optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);
        const int num_users = inst.channels.num_users();
        const int m = inst.channels.num_antennas();

        std::vector<double> gamma_opt(num_users);
        for (int k = 0; k < num_users; ++k) {
            gamma_opt[k] = sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, k);

            // Independent oracle: principal generalized eigenvector of the
            // (signal, interference-plus-noise) matrix pencil.
            const Eigen::VectorXcd h = equivalent_channel(inst.channels, inst.ris, k);
            const Eigen::MatrixXcd signal = inst.powers.p(k) * h * h.adjoint();
            const Eigen::MatrixXcd lambda =
                interference_covariance(inst.channels, inst.ris, inst.powers, inst.noise, k);
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(signal, lambda);
            Eigen::VectorXcd principal = solver.eigenvectors().col(m - 1);
            principal.normalize();
            const double overlap = std::abs(principal.dot(beams.w.col(k)));
            min_overlap = std::min(min_overlap, overlap);
        }

        Rng rng(mix_seed(seed, 0xb1, i));
        for (int r = 0; r < kRandomBeams; ++r) {
            BeamformingMatrix candidate = beams;
            const Eigen::VectorXcd w = random_unit_vector(m, rng);
            for (int k = 0; k < num_users; ++k) {
                candidate.w.col(k) = w;
                const double gamma =
                    sinr(inst.channels, inst.ris, inst.powers, candidate, inst.noise, k);
                ++comparisons;
                if (gamma > gamma_opt[k] * (1.0 + 1e-10)) {
                    ++violations;
                }
                candidate.w.col(k) = beams.w.col(k);
            }
        }
    }

    result.passed = (min_overlap >= 1.0 - 1e-8) && violations == 0;
    result.detail = "min eigenvector overlap " + format_sci(min_overlap) + ", " +
                    std::to_string(violations) + "/" + std::to_string(comparisons) +
                    " dominance violations";
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_sinr_consistency(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"sinr-monte-carlo", false, "", 0.0};
    constexpr int kInstances = 20;
    constexpr long kSamples = 1000000;
    double worst = 0.0;
    bool any_overflow = false;

    for (int i = 0; i < kInstances; ++i) {
        const Instance inst = random_instance(4, 3, 2, 5, mix_seed(seed, 0xc0, i));
        const BeamformingMatrix beams =
            optimal_beamforming(inst.channels, inst.ris, inst.powers, inst.noise);
        const int k = i % inst.channels.num_users();
        const double analytic = sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, k);
        const McSinrEstimate mc =
            monte_carlo_sinr(inst.channels, inst.ris, inst.powers, beams, inst.noise, k,
                             kSamples, mix_seed(seed, 0xc1, i));
        any_overflow = any_overflow || mc.overflow;
        worst = std::max(worst, std::abs(mc.value - analytic) / analytic);
    }

    result.passed = worst <= 0.02 && !any_overflow;
    result.detail = "worst relative error " + format_sci(worst) + " over " +
                    std::to_string(kInstances) + " instances";
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_antenna_trend(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"antenna-sweep-trend", false, "", 0.0};
    ExperimentConfig cfg;
    cfg.experiment = "antenna_sweep";
    cfg.antenna_counts = {4, 8, 12, 16};
    cfg.seeds = {seed, seed + 1, seed + 2, seed + 3, seed + 4};
    const std::vector<AntennaSweepRow> rows = antenna_sweep(cfg);

    bool monotone = true;
    bool dominates = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].optimal_min_rate < rows[i - 1].optimal_min_rate * (1.0 - 1e-12)) {
            monotone = false;
        }
        if (rows[i].optimal_min_rate <= rows[i].random_min_rate) {
            dominates = false;
        }
    }
    const double ratio_first = rows.front().optimal_min_rate / rows.front().random_min_rate;
    const double ratio_last = rows.back().optimal_min_rate / rows.back().random_min_rate;
    const bool widening = ratio_last > ratio_first;

    result.passed = monotone && dominates && widening;
    std::ostringstream detail;
    detail << "optimal min-rate";
    for (const AntennaSweepRow& row : rows) {
        detail << ' ' << format_sci(row.optimal_min_rate);
    }
    detail << "; ratio " << format_sci(ratio_first) << " -> " << format_sci(ratio_last);
    result.detail = detail.str();
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_channel_moments(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"channel-moments", false, "", 0.0};
    constexpr int kDraws = 100000;

    PlacementConfig placement;
    placement.num_antennas = 2;
    placement.num_users = 1;
    placement.num_ris = 1;
    placement.uniform_elements = 4;
    const SystemGeometry geometry = place_nodes(placement, seed);
    const FadingParams fading = FadingParams::defaults(1);

    double sum_direct = 0.0;
    double sum_user_ris = 0.0;
    double sum_ris_bs = 0.0;
    long n_direct = 0;
    long n_user_ris = 0;
    long n_ris_bs = 0;
    for (int draw = 0; draw < kDraws; ++draw) {
        const ChannelRealization channels =
            generate_channels(geometry, fading, mix_seed(seed, 0xd0, draw));
        sum_direct += channels.direct[0].squaredNorm();
        n_direct += channels.direct[0].size();
        sum_user_ris += channels.user_to_ris[0][0].squaredNorm();
        n_user_ris += channels.user_to_ris[0][0].size();
        sum_ris_bs += channels.ris_to_bs[0].squaredNorm();
        n_ris_bs += channels.ris_to_bs[0].size();
    }

    const auto expected = [&fading](double distance, double zeta) {
        return fading.eta * std::pow(distance, -zeta);
    };
    const double e_direct = expected(geometry.user_bs_distance(0), fading.direct_exponent());
    const double e_user_ris =
        expected(geometry.user_ris_distance(0, 0), fading.user_ris_exponent());
    const double e_ris_bs = expected(geometry.ris_bs_distance(0), fading.ris_bs_exponent());

    const double err_direct = std::abs(sum_direct / n_direct - e_direct) / e_direct;
    const double err_user_ris = std::abs(sum_user_ris / n_user_ris - e_user_ris) / e_user_ris;
    const double err_ris_bs = std::abs(sum_ris_bs / n_ris_bs - e_ris_bs) / e_ris_bs;

    result.passed = err_direct <= 0.02 && err_user_ris <= 0.02 && err_ris_bs <= 0.02;
    result.detail = "relative moment errors: direct " + format_sci(err_direct) + ", user-RIS " +
                    format_sci(err_user_ris) + ", RIS-BS " + format_sci(err_ris_bs);
    result.seconds = timer.elapsed();
    return result;
}

namespace {

double weighted_output(const nn::MlpSpec& spec, const nn::ParameterSet& params,
                       const Eigen::MatrixXd& input, const Eigen::MatrixXd& weights) {
    return (nn::forward(spec, params, input).array() * weights.array()).sum();
}

// Largest relative mismatch between backprop and central differences over a
// sample of parameter and input coordinates.
double gradient_mismatch(const nn::MlpSpec& spec, nn::ParameterSet params,
                         Eigen::MatrixXd input, Rng& rng, int coords_per_tensor) {
    nn::ForwardCache cache;
    Eigen::MatrixXd out = nn::forward(spec, params, input, &cache);

    // ReLU kinks break central differences. The finite-difference probes
    // shift pre-activations by roughly h times the activation scale, so every
    // pre-activation must sit well clear of zero; resample the instance until
    // the margin holds.
    for (int attempt = 0; attempt < 50; ++attempt) {
        double min_pre = 1e9;
        for (int layer = 0; layer < spec.num_affine_layers(); ++layer) {
            if (spec.activation_of(layer) == nn::Activation::Relu) {
                min_pre = std::min(min_pre, cache.pre[layer].cwiseAbs().minCoeff());
            }
        }
        if (min_pre > 1e-2) {
            break;
        }
        params = nn::ParameterSet::init(spec, rng, 0.5);
        for (Eigen::Index i = 0; i < input.size(); ++i) {
            input(i) = rng.normal();
        }
        out = nn::forward(spec, params, input, &cache);
    }

    Eigen::MatrixXd loss_weights(out.rows(), out.cols());
    for (Eigen::Index i = 0; i < loss_weights.size(); ++i) {
        loss_weights(i) = rng.normal();
    }
    const nn::Gradients grads = nn::backward(spec, params, cache, loss_weights);

    double worst = 0.0;
    const auto compare = [&](double analytic, double* value) {
        const double h = 1e-5 * std::max(1.0, std::abs(*value));
        const double saved = *value;
        *value = saved + h;
        const double up = weighted_output(spec, params, input, loss_weights);
        *value = saved - h;
        const double down = weighted_output(spec, params, input, loss_weights);
        *value = saved;
        const double fd = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
        worst = std::max(worst, std::abs(analytic - fd) / scale);
    };

    for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
        for (int c = 0; c < coords_per_tensor; ++c) {
            const auto wi = static_cast<Eigen::Index>(
                rng.uniform_int(static_cast<std::uint64_t>(params.weights[layer].size())));
            compare(grads.params.weights[layer](wi), &params.weights[layer](wi));
            const auto bi = static_cast<Eigen::Index>(
                rng.uniform_int(static_cast<std::uint64_t>(params.biases[layer].size())));
            compare(grads.params.biases[layer](bi), &params.biases[layer](bi));
        }
    }
    for (int c = 0; c < coords_per_tensor; ++c) {
        const auto xi = static_cast<Eigen::Index>(
            rng.uniform_int(static_cast<std::uint64_t>(input.size())));
        compare(grads.input(xi), &input(xi));
    }
    return worst;
}

}  // namespace

CheckResult check_gradients(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"gradient-finite-difference", false, "", 0.0};
    Rng rng(mix_seed(seed, 0xe0));

    std::vector<nn::MlpSpec> shapes;
    const auto add_shape = [&shapes](std::vector<int> sizes, nn::Activation out) {
        nn::MlpSpec spec;
        spec.layer_sizes = std::move(sizes);
        spec.output_activation = out;
        shapes.push_back(spec);
    };
    // Shapes the agents instantiate on the default scenario (K=4, L=4,
    // N_l=10: observation 328, action 84) and on the toy control task.
    add_shape({328, 128, 128, 168}, nn::Activation::Identity);  // stochastic actor head
    add_shape({328, 128, 128, 84}, nn::Activation::Tanh);       // deterministic actor
    add_shape({412, 128, 128, 1}, nn::Activation::Identity);    // critic
    add_shape({2, 128, 128, 2}, nn::Activation::Identity);
    add_shape({2, 128, 128, 1}, nn::Activation::Tanh);
    add_shape({3, 128, 128, 1}, nn::Activation::Identity);

    while (shapes.size() < 50) {
        const int depth = 1 + static_cast<int>(rng.uniform_int(3));
        std::vector<int> sizes;
        sizes.push_back(1 + static_cast<int>(rng.uniform_int(10)));
        for (int d = 0; d < depth; ++d) {
            sizes.push_back(1 + static_cast<int>(rng.uniform_int(16)));
        }
        sizes.push_back(1 + static_cast<int>(rng.uniform_int(6)));
        nn::MlpSpec spec;
        spec.layer_sizes = std::move(sizes);
        spec.hidden_activation =
            rng.uniform() < 0.5 ? nn::Activation::Relu : nn::Activation::Tanh;
        const double pick = rng.uniform();
        spec.output_activation = pick < 0.34  ? nn::Activation::Identity
                                 : pick < 0.67 ? nn::Activation::Tanh
                                               : nn::Activation::Relu;
        shapes.push_back(spec);
    }

    double worst = 0.0;
    for (const nn::MlpSpec& spec : shapes) {
        nn::ParameterSet params = nn::ParameterSet::init(spec, rng, 0.5);
        const Eigen::Index batch = 1 + static_cast<Eigen::Index>(rng.uniform_int(5));
        Eigen::MatrixXd input(spec.input_size(), batch);
        for (Eigen::Index i = 0; i < input.size(); ++i) {
            input(i) = rng.normal();
        }
        worst = std::max(worst, gradient_mismatch(spec, std::move(params), std::move(input),
                                                  rng, 6));
    }

    result.passed = worst < 1e-4;
    result.detail = "worst relative gradient error " + format_sci(worst) + " over " +
                    std::to_string(shapes.size()) + " shapes";
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_constraints(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"constraint-satisfaction", false, "", 0.0};
    constexpr int kSteps = 10000;

    ExperimentConfig cfg;
    cfg.episode.seed = seed;
    UplinkEnvironment env = make_environment(cfg, seed);
    const double p_max = cfg.scenario.p_max;
    const double phi_max = cfg.scenario.phi_max();
    Rng rng(mix_seed(seed, 0xf0));

    long violations = 0;
    double worst_norm = 0.0;
    env.reset();
    for (int step = 0; step < kSteps; ++step) {
        Eigen::VectorXd action(env.action_dim());
        for (Eigen::Index i = 0; i < action.size(); ++i) {
            action(i) = rng.uniform(-1.0, 1.0);
        }
        const StepResult res = env.step(action);

        const BeamformingMatrix& beams = env.beams();
        for (int k = 0; k < beams.num_users(); ++k) {
            const double norm_error = std::abs(beams.w.col(k).norm() - 1.0);
            worst_norm = std::max(worst_norm, norm_error);
            if (norm_error > 1e-10) {
                ++violations;
            }
        }
        const Eigen::VectorXd& p = env.powers().p;
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            if (p(k) < 0.0 || p(k) > p_max) {
                ++violations;
            }
        }
        for (const Eigen::VectorXcd& phi : env.ris_profile().phi) {
            for (Eigen::Index n = 0; n < phi.size(); ++n) {
                if (std::abs(phi(n)) > phi_max + 1e-12) {
                    ++violations;
                }
            }
        }
        if (res.done) {
            env.reset();
        }
    }

    result.passed = violations == 0;
    result.detail = std::to_string(violations) + " violations over " + std::to_string(kSteps) +
                    " steps; worst beamformer norm error " + format_sci(worst_norm);
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_squashed_gaussian(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"squashed-gaussian-density", false, "", 0.0};

    const Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(1, 1);
    const Eigen::MatrixXd log_std = Eigen::MatrixXd::Zero(1, 1);

    // Simpson quadrature of the density over the open action interval.
    constexpr int kIntervals = 200000;  // even
    const double lo = -1.0 + 1e-12;
    const double hi = 1.0 - 1e-12;
    const double h = (hi - lo) / kIntervals;
    const auto density = [&](double a) {
        Eigen::MatrixXd pre(1, 1);
        pre(0, 0) = std::atanh(a);
        return std::exp(nn::squashed_log_prob(mu, log_std, pre)(0));
    };
    double integral = density(lo) + density(hi);
    for (int i = 1; i < kIntervals; ++i) {
        integral += density(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    integral *= h / 3.0;
    const double quadrature_error = std::abs(integral - 1.0);

    // Kolmogorov-Smirnov distance between 1e6 samples and the analytic CDF
    // F(a) = Phi(atanh(a)).
    constexpr long kSamples = 1000000;
    Rng rng(mix_seed(seed, 0xf1));
    std::vector<double> samples;
    samples.reserve(kSamples);
    constexpr Eigen::Index kChunk = 10000;
    const Eigen::MatrixXd mu_chunk = Eigen::MatrixXd::Zero(1, kChunk);
    const Eigen::MatrixXd log_std_chunk = Eigen::MatrixXd::Zero(1, kChunk);
    while (static_cast<long>(samples.size()) < kSamples) {
        const nn::GaussianSample sample = nn::sample_squashed(mu_chunk, log_std_chunk, rng);
        for (Eigen::Index j = 0; j < kChunk; ++j) {
            samples.push_back(sample.action(0, j));
        }
    }
    std::sort(samples.begin(), samples.end());
    double ks = 0.0;
    const double inv_n = 1.0 / static_cast<double>(kSamples);
    for (long i = 0; i < kSamples; ++i) {
        const double cdf = 0.5 * std::erfc(-std::atanh(samples[static_cast<std::size_t>(i)]) /
                                           std::numbers::sqrt2);
        ks = std::max(ks, std::max(cdf - i * inv_n, (i + 1) * inv_n - cdf));
    }

    result.passed = quadrature_error <= 1e-3 && ks < 0.01;
    result.detail = "quadrature |integral-1| " + format_sci(quadrature_error) +
                    ", KS statistic " + format_sci(ks);
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_buffer_uniformity(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"replay-uniformity", false, "", 0.0};

    ReplayBuffer buffer(10, 1, 1);
    for (int i = 0; i < 10; ++i) {
        Transition t;
        t.state = Eigen::VectorXd::Constant(1, static_cast<double>(i));
        t.action = Eigen::VectorXd::Zero(1);
        t.next_state = Eigen::VectorXd::Zero(1);
        t.reward = static_cast<double>(i);
        buffer.insert(t);
    }
    Rng rng(mix_seed(seed, 0xf2));
    std::vector<long> counts(10, 0);
    constexpr long kSamples = 100000;
    for (long i = 0; i < kSamples; ++i) {
        const auto batch = buffer.sample(1, rng);
        counts[static_cast<std::size_t>(batch->rewards(0))] += 1;
    }
    double worst = 0.0;
    for (const long count : counts) {
        worst = std::max(worst, std::abs(count / static_cast<double>(kSamples) - 0.1));
    }

    result.passed = worst <= 0.01;
    result.detail = "worst |frequency - 0.1| = " + format_sci(worst);
    result.seconds = timer.elapsed();
    return result;
}

CheckResult check_determinism(std::uint64_t seed) {
    Timer timer;
    CheckResult result{"determinism", false, "", 0.0};

    ExperimentConfig cfg;
    cfg.agent = "sac";
    cfg.episodes = 3;
    cfg.episode.steps_per_episode = 10;
    cfg.scenario.placement.num_antennas = 2;
    cfg.scenario.placement.num_users = 2;
    cfg.scenario.placement.num_ris = 2;
    cfg.scenario.placement.uniform_elements = 4;
    cfg.scenario.fading = FadingParams::defaults(2);
    cfg.hyperparams.batch_size = 16;
    cfg.buffer_capacity = 1000;

    const std::string first = metrics_csv_text(run_training(cfg, seed));
    const std::string second = metrics_csv_text(run_training(cfg, seed));
    const bool csv_identical = first == second;

    ExperimentConfig changed = cfg;
    changed.episodes += 1;
    const bool hash_sensitive = changed.hash() != cfg.hash();

    result.passed = csv_identical && hash_sensitive;
    result.detail = std::string(csv_identical ? "repeated run byte-identical"
                                              : "repeated run DIFFERS") +
                    (hash_sensitive ? "; config hash tracks changes"
                                    : "; config hash MISSED a change");
    result.seconds = timer.elapsed();
    return result;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    return {
        check_beamforming_optimality(seed), check_sinr_consistency(seed),
        check_antenna_trend(seed),          check_channel_moments(seed),
        check_gradients(seed),              check_constraints(seed),
        check_squashed_gaussian(seed),      check_buffer_uniformity(seed),
        check_determinism(seed),
    };
}

}  // namespace risopt
