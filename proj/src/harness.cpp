#include "risopt/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "risopt/errors.hpp"
#include "risopt/rng.hpp"

#ifndef RISOPT_GIT_REV
#define RISOPT_GIT_REV "unknown"
#endif

namespace risopt {

namespace {

constexpr std::uint64_t kWarmupStream = 0x7761726d75700000ULL;
constexpr std::uint64_t kSampleStream = 0x73616d706c650000ULL;
constexpr std::uint64_t kSweepStream = 0x7377656570000000ULL;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::VectorXd uniform_action(Eigen::Index dim, Rng& rng) {
    Eigen::VectorXd action(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        action(i) = rng.uniform(-1.0, 1.0);
    }
    return action;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir + ": " + ec.message());
    }
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string lr_tag(double lr) {
    std::string tag = format_double(lr);
    for (char& c : tag) {
        if (c == '.' || c == '+') {
            c = '_';
        }
    }
    return tag;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& out_dir,
                    const std::string& command, const std::vector<std::string>& outputs,
                    double runtime_seconds) {
    nlohmann::json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = cfg.hash();
    manifest["config"] = nlohmann::json::parse(cfg.canonical_json());
    manifest["code_version"] = RISOPT_GIT_REV;
    manifest["outputs"] = outputs;
    manifest["runtime_seconds"] = runtime_seconds;
    write_text_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
}

void write_plot_script(const std::string& out_dir, const std::string& name,
                       const std::string& body) {
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set xlabel 'episode'\n"
        << "set ylabel 'minimum rate (bits/s/Hz)'\n"
        << body;
    write_text_file(join(out_dir, name), out.str());
}

}  // namespace

std::string code_version() { return RISOPT_GIT_REV; }

UplinkEnvironment make_environment(const ExperimentConfig& cfg, std::uint64_t seed) {
    EpisodeConfig episode = cfg.episode;
    episode.seed = seed;
    return UplinkEnvironment(cfg.scenario, episode);
}

MetricsLog run_training(const ExperimentConfig& cfg, std::uint64_t seed,
                        const std::string& checkpoint_path) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    UplinkEnvironment env = make_environment(cfg, seed);
    const Eigen::Index obs_dim = env.observation_dim();
    const Eigen::Index act_dim = env.action_dim();
    const bool learner = cfg.agent != "random";
    std::unique_ptr<Agent> agent =
        make_agent(cfg.agent, obs_dim, act_dim, cfg.hyperparams, seed);
    ReplayBuffer buffer(cfg.buffer_capacity, obs_dim, act_dim);
    Rng warmup_rng(mix_seed(seed, kWarmupStream));
    Rng sample_rng(mix_seed(seed, kSampleStream));

    MetricsLog log;
    log.agent = cfg.agent;
    log.learning_rate = cfg.hyperparams.learning_rate;
    log.seed = seed;
    log.config_hash = cfg.hash();

    for (int episode = 1; episode <= cfg.episodes; ++episode) {
        const auto episode_start = std::chrono::steady_clock::now();
        Eigen::VectorXd obs = env.reset();
        const bool warmup = learner && episode <= cfg.warmup_episodes;
        double reward_sum = 0.0;
        StepResult result;
        for (int step = 0; step < cfg.episode.steps_per_episode; ++step) {
            const Eigen::VectorXd action = warmup ? uniform_action(act_dim, warmup_rng)
                                                  : agent->select_action(obs, true);
            result = env.step(action);
            // The episode boundary is a time limit, not a terminal state, so
            // stored transitions keep bootstrapping across it.
            buffer.insert({obs, action, result.reward, result.observation, false});
            if (learner && !warmup) {
                if (auto batch = buffer.sample(cfg.hyperparams.batch_size, sample_rng)) {
                    agent->update(*batch);
                }
            }
            reward_sum += result.reward;
            obs = result.observation;
        }

        EpisodeRecord record;
        record.episode = episode;
        record.min_rate = result.info.min_rate;
        record.mean_step_reward = reward_sum / cfg.episode.steps_per_episode;
        record.user_rates = result.info.rates;
        record.wall_clock_seconds = seconds_since(episode_start);
        log.records.push_back(std::move(record));

        if (cfg.early_stop && episode >= 2 * cfg.early_stop_window) {
            const double recent = trailing_median(log, cfg.early_stop_window, episode);
            const double previous =
                trailing_median(log, cfg.early_stop_window, episode - cfg.early_stop_window);
            if (std::abs(recent - previous) <=
                cfg.early_stop_tolerance * std::abs(previous) + 1e-12) {
                break;
            }
        }
    }

    log.total_seconds = seconds_since(start);
    log.validate();
    if (!checkpoint_path.empty() && learner) {
        agent->save(checkpoint_path);
    }
    return log;
}

std::vector<AntennaSweepRow> antenna_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<AntennaSweepRow> rows;
    for (const int m : cfg.antenna_counts) {
        AntennaSweepRow row;
        row.num_antennas = m;
        ScenarioParams scenario = cfg.scenario;
        scenario.placement.num_antennas = m;
        const double phi_max = scenario.phi_max();
        for (const std::uint64_t seed : cfg.seeds) {
            const SystemGeometry geometry = place_nodes(scenario.placement, seed);
            const ChannelRealization channels = generate_channels(
                geometry, scenario.fading, mix_seed(seed, kSweepStream, 1));
            const NoisePowers noise = NoisePowers::from(scenario.fading);

            // One draw of feasible random powers and surface coefficients,
            // shared by both beamforming strategies.
            Rng rng(mix_seed(seed, kSweepStream, 2));
            PowerAllocation powers;
            powers.p_max = scenario.p_max;
            powers.p.resize(geometry.num_users());
            for (int k = 0; k < geometry.num_users(); ++k) {
                powers.p(k) = rng.uniform(0.0, scenario.p_max);
            }
            RisProfile ris = RisProfile::zeros(geometry.elements_per_ris, phi_max);
            for (auto& phi : ris.phi) {
                for (Eigen::Index n = 0; n < phi.size(); ++n) {
                    const double radius = phi_max * std::sqrt(rng.uniform());
                    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    phi(n) = std::polar(radius, angle);
                }
            }

            const BeamformingMatrix optimal = optimal_beamforming(channels, ris, powers, noise);
            const BeamformingMatrix random = random_beamforming(
                geometry.num_antennas, geometry.num_users(), mix_seed(seed, kSweepStream, 3));
            const RateReport optimal_report = rate_report(channels, ris, powers, optimal, noise);
            const RateReport random_report = rate_report(channels, ris, powers, random, noise);
            row.optimal_min_rate += optimal_report.min_rate;
            row.random_min_rate += random_report.min_rate;
            row.optimal_min_sinr += optimal_report.sinr.minCoeff();
            row.random_min_sinr += random_report.sinr.minCoeff();
        }
        const double scale = 1.0 / static_cast<double>(cfg.seeds.size());
        row.optimal_min_rate *= scale;
        row.random_min_rate *= scale;
        row.optimal_min_sinr *= scale;
        row.random_min_sinr *= scale;
        rows.push_back(row);
    }
    return rows;
}

void run_parallel(std::vector<std::function<void()>> tasks) {
    std::size_t jobs = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("RISOPT_JOBS")) {
        jobs = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    }
    jobs = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
    if (jobs <= 1) {
        for (auto& task : tasks) {
            task();
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t index = next.fetch_add(1);
                if (index >= tasks.size()) {
                    return;
                }
                tasks[index]();
            }
        });
    }
    for (std::thread& worker : workers) {
        worker.join();
    }
}

void emit_train(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    ensure_dir(out_dir);
    std::vector<MetricsLog> logs(cfg.seeds.size());
    std::vector<std::string> outputs;
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        const std::uint64_t seed = cfg.seeds[i];
        const std::string csv =
            join(out_dir, "train_" + cfg.agent + "_seed" + std::to_string(seed) + ".csv");
        const std::string ckpt =
            join(out_dir, "checkpoint_" + cfg.agent + "_seed" + std::to_string(seed) + ".bin");
        outputs.push_back(csv);
        if (cfg.agent != "random") {
            outputs.push_back(ckpt);
        }
        tasks.emplace_back([&cfg, seed, csv, ckpt, &logs, i] {
            logs[i] = run_training(cfg, seed, cfg.agent != "random" ? ckpt : "");
            write_metrics_csv(logs[i], csv);
        });
    }
    run_parallel(std::move(tasks));

    const std::string curve_csv = join(out_dir, "train_" + cfg.agent + "_median.csv");
    write_curve_csv(aggregate_curves(logs), curve_csv);
    outputs.push_back(curve_csv);
    write_plot_script(out_dir, "plot_train.gp",
                      "plot 'train_" + cfg.agent + "_median.csv' using 1:2 with lines, '' using "
                      "1:3 with lines dt 2, '' using 1:4 with lines dt 2\npause -1\n");
    write_manifest(cfg, out_dir, "train", outputs, seconds_since(start));
}

void emit_antenna_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<AntennaSweepRow> rows = antenna_sweep(cfg);
    ensure_dir(out_dir);
    const std::string csv = join(out_dir, "antenna_sweep.csv");
    write_antenna_csv(rows, csv);
    std::ostringstream plot;
    plot << "set xlabel 'number of BS antennas'\n"
         << "plot 'antenna_sweep.csv' using 1:2 with linespoints, '' using 1:3 with "
            "linespoints\npause -1\n";
    write_text_file(join(out_dir, "plot_antenna_sweep.gp"),
                    "set datafile separator ','\nset key autotitle columnhead\n" + plot.str());
    write_manifest(cfg, out_dir, "antenna-sweep", {csv}, seconds_since(start));
}

void emit_lr_study(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    ensure_dir(out_dir);

    struct Cell {
        std::string agent;
        double lr;
        std::uint64_t seed;
        std::size_t slot;
    };
    std::vector<Cell> cells;
    std::size_t slot = 0;
    for (const std::string& agent : cfg.study_agents) {
        for (const double lr : cfg.learning_rates) {
            for (const std::uint64_t seed : cfg.seeds) {
                cells.push_back({agent, lr, seed, slot++});
            }
        }
    }
    std::vector<MetricsLog> logs(cells.size());
    std::vector<std::function<void()>> tasks;
    tasks.reserve(cells.size());
    for (const Cell& cell : cells) {
        tasks.emplace_back([&cfg, cell, &logs] {
            ExperimentConfig run_cfg = cfg;
            run_cfg.agent = cell.agent;
            run_cfg.hyperparams.learning_rate = cell.lr;
            logs[cell.slot] = run_training(run_cfg, cell.seed);
        });
    }
    run_parallel(std::move(tasks));

    std::vector<std::string> outputs;
    std::ostringstream summary;
    summary << "agent,learning_rate,seed,final_median_min_rate\n";
    std::ostringstream overlay;
    slot = 0;
    for (const std::string& agent : cfg.study_agents) {
        for (const double lr : cfg.learning_rates) {
            std::vector<MetricsLog> combo;
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
                const MetricsLog& log = logs[slot++];
                const std::string csv =
                    join(out_dir, "lr_study_" + agent + "_lr" + lr_tag(lr) + "_seed" +
                                      std::to_string(log.seed) + ".csv");
                write_metrics_csv(log, csv);
                outputs.push_back(csv);
                const int window = std::min<int>(20, static_cast<int>(log.records.size()));
                summary << agent << ',' << format_double(lr) << ',' << log.seed << ','
                        << format_double(trailing_median(log, window,
                                                         static_cast<int>(log.records.size())))
                        << "\n";
                combo.push_back(log);
            }
            const std::string curve_name = "lr_study_" + agent + "_lr" + lr_tag(lr) + ".csv";
            write_curve_csv(aggregate_curves(combo), join(out_dir, curve_name));
            outputs.push_back(join(out_dir, curve_name));
            overlay << (overlay.tellp() > 0 ? ", \\\n  " : "plot ") << "'" << curve_name
                    << "' using 1:2 with lines title '" << agent << " lr=" << format_double(lr)
                    << "'";
        }
    }
    const std::string summary_csv = join(out_dir, "lr_study_summary.csv");
    write_text_file(summary_csv, summary.str());
    outputs.push_back(summary_csv);
    write_plot_script(out_dir, "plot_lr_study.gp", overlay.str() + "\npause -1\n");
    write_manifest(cfg, out_dir, "lr-study", outputs, seconds_since(start));
}

void emit_scale_study(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    ensure_dir(out_dir);

    struct Cell {
        ScaleCase scale_case;
        std::uint64_t seed;
        std::size_t slot;
    };
    std::vector<Cell> cells;
    std::size_t slot = 0;
    for (const ScaleCase& scale_case : cfg.scale_cases) {
        for (const std::uint64_t seed : cfg.seeds) {
            cells.push_back({scale_case, seed, slot++});
        }
    }

    std::vector<MetricsLog> logs(cells.size());
    std::vector<std::function<void()>> tasks;
    for (const Cell& cell : cells) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.agent = "sac";
        run_cfg.hyperparams.learning_rate = cfg.scale_learning_rate;
        run_cfg.episodes = cfg.scale_episodes;
        run_cfg.scenario.placement.num_users = cell.scale_case.num_users;
        run_cfg.scenario.placement.elements_per_ris.clear();
        run_cfg.scenario.placement.uniform_elements = cell.scale_case.elements_per_ris;
        const Eigen::Index act_dim = action_dim(
            run_cfg.scenario.placement.num_users,
            run_cfg.scenario.placement.num_ris * cell.scale_case.elements_per_ris);
        if (act_dim > cfg.action_dim_warning_cap) {
            std::fprintf(stderr,
                         "warning: action dimension %lld exceeds the configured cap %d\n",
                         static_cast<long long>(act_dim), cfg.action_dim_warning_cap);
        }
        const std::uint64_t seed = cell.seed;
        const std::size_t out_slot = cell.slot;
        tasks.emplace_back(
            [run_cfg, seed, out_slot, &logs] { logs[out_slot] = run_training(run_cfg, seed); });
    }
    run_parallel(std::move(tasks));

    std::vector<std::string> outputs;
    std::ostringstream summary;
    summary << "num_users,elements_per_ris,total_elements,observation_dim,action_dim,seed,"
               "convergence_episode\n";
    std::ostringstream overlay;
    slot = 0;
    for (const ScaleCase& scale_case : cfg.scale_cases) {
        const int total =
            cfg.scenario.placement.num_ris * scale_case.elements_per_ris;
        const std::string tag = "k" + std::to_string(scale_case.num_users) + "_n" +
                                std::to_string(scale_case.elements_per_ris);
        std::vector<MetricsLog> combo;
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            const MetricsLog& log = logs[slot++];
            const std::string csv =
                join(out_dir, "scale_" + tag + "_seed" + std::to_string(log.seed) + ".csv");
            write_metrics_csv(log, csv);
            outputs.push_back(csv);
            const int window = std::min<int>(20, static_cast<int>(log.records.size()));
            summary << scale_case.num_users << ',' << scale_case.elements_per_ris << ',' << total
                    << ',' << observation_dim(scale_case.num_users, total) << ','
                    << action_dim(scale_case.num_users, total) << ',' << log.seed << ','
                    << convergence_episode(log, window) << "\n";
            combo.push_back(log);
        }
        const std::string curve_name = "scale_" + tag + ".csv";
        write_curve_csv(aggregate_curves(combo), join(out_dir, curve_name));
        outputs.push_back(join(out_dir, curve_name));
        overlay << (overlay.tellp() > 0 ? ", \\\n  " : "plot ") << "'" << curve_name
                << "' using 1:2 with lines title 'K=" << scale_case.num_users
                << " N=" << total << "'";
    }
    const std::string summary_csv = join(out_dir, "scale_study_summary.csv");
    write_text_file(summary_csv, summary.str());
    outputs.push_back(summary_csv);
    write_plot_script(out_dir, "plot_scale_study.gp", overlay.str() + "\npause -1\n");
    write_manifest(cfg, out_dir, "scale-study", outputs, seconds_since(start));
}

}  // namespace risopt
