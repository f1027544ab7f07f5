#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace risopt {

struct EpisodeRecord {
    int episode = 0;  // 1-based
    double min_rate = 0.0;  // at the final step of the episode
    double mean_step_reward = 0.0;
    Eigen::VectorXd user_rates;  // at the final step
    double wall_clock_seconds = 0.0;  // in memory and manifest only, never in CSV
};

struct MetricsLog {
    std::string agent;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<EpisodeRecord> records;
    double total_seconds = 0.0;

    // Episode indices strictly increasing, all rates finite and >= 0.
    void validate() const;
};

double median_of(std::vector<double> values);
// Linearly interpolated quantile, q in [0, 1].
double quantile_of(std::vector<double> values, double q);

// Median min-rate over the trailing `window` episodes ending at 1-based
// episode `last` (inclusive).
double trailing_median(const MetricsLog& log, int window, int last);

// First 1-based episode whose trailing-`window` median lies within
// `tolerance` (relative) of the final trailing-`window` median.
int convergence_episode(const MetricsLog& log, int window = 20, double tolerance = 0.05);

struct CurvePoint {
    int episode = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

// Per-episode median and interquartile band across runs (same length each).
std::vector<CurvePoint> aggregate_curves(const std::vector<MetricsLog>& runs);

struct AntennaSweepRow {
    int num_antennas = 0;
    double optimal_min_rate = 0.0;
    double random_min_rate = 0.0;
    double optimal_min_sinr = 0.0;
    double random_min_sinr = 0.0;
};

// Shortest round-trip decimal form; exact re-parse, byte-stable across runs.
std::string format_double(double value);

// All writers are atomic: content goes to <path>.tmp then is renamed.
void write_text_file(const std::string& path, const std::string& content);

// Columns: episode,min_rate,mean_step_reward,rate_user_0..K-1.
std::string metrics_csv_text(const MetricsLog& log);
void write_metrics_csv(const MetricsLog& log, const std::string& path);

// Columns: episode,median_min_rate,q25_min_rate,q75_min_rate.
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

// Columns: M,optimal_min_rate,random_min_rate,optimal_min_sinr,random_min_sinr.
void write_antenna_csv(const std::vector<AntennaSweepRow>& rows, const std::string& path);

}  // namespace risopt
