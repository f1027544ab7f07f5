#pragma once

#include <functional>
#include <string>
#include <vector>

#include "risopt/config.hpp"
#include "risopt/environment.hpp"
#include "risopt/metrics.hpp"

namespace risopt {

UplinkEnvironment make_environment(const ExperimentConfig& cfg, std::uint64_t seed);

// One seeded training run: per episode, reset; per step, select action, step
// the environment, store the transition, and (after the warmup episodes) do
// one gradient update per step. Writes a final checkpoint when
// checkpoint_path is non-empty and the agent learns.
MetricsLog run_training(const ExperimentConfig& cfg, std::uint64_t seed,
                        const std::string& checkpoint_path = "");

// Fixed random powers and surface coefficients per seed; compares optimal
// against random receive beamforming for each antenna count, averaged over
// the config seeds.
std::vector<AntennaSweepRow> antenna_sweep(const ExperimentConfig& cfg);

// Directory-writing commands behind the CLI. All emit CSV files, a JSON run
// manifest, and a gnuplot script.
void emit_train(const ExperimentConfig& cfg, const std::string& out_dir);
void emit_antenna_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
void emit_lr_study(const ExperimentConfig& cfg, const std::string& out_dir);
void emit_scale_study(const ExperimentConfig& cfg, const std::string& out_dir);

// Runs tasks in parallel slots (RISOPT_JOBS env var, default hardware
// concurrency). Tasks must be independent.
void run_parallel(std::vector<std::function<void()>> tasks);

std::string code_version();

}  // namespace risopt
