#include "risopt/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risopt/errors.hpp"

namespace risopt {

void MetricsLog::validate() const {
    int last = 0;
    for (const EpisodeRecord& r : records) {
        if (r.episode <= last) {
            throw InternalConsistencyError("episode indices must be strictly increasing");
        }
        last = r.episode;
        if (!std::isfinite(r.min_rate) || r.min_rate < 0.0) {
            throw InternalConsistencyError("min_rate must be finite and nonnegative");
        }
        for (Eigen::Index k = 0; k < r.user_rates.size(); ++k) {
            if (!std::isfinite(r.user_rates(k)) || r.user_rates(k) < 0.0) {
                throw InternalConsistencyError("user rates must be finite and nonnegative");
            }
        }
    }
}

double median_of(std::vector<double> values) { return quantile_of(std::move(values), 0.5); }

double quantile_of(std::vector<double> values, double q) {
    if (values.empty()) {
        throw InvalidInputError("quantile of an empty sample");
    }
    if (q < 0.0 || q > 1.0) {
        throw InvalidParameterError("quantile level must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double position = q * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(position);
    if (lower + 1 >= values.size()) {
        return values.back();
    }
    const double frac = position - static_cast<double>(lower);
    return values[lower] * (1.0 - frac) + values[lower + 1] * frac;
}

double trailing_median(const MetricsLog& log, int window, int last) {
    if (window < 1 || last < window || last > static_cast<int>(log.records.size())) {
        throw InvalidParameterError("trailing window out of range");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(window));
    for (int e = last - window; e < last; ++e) {
        values.push_back(log.records[static_cast<std::size_t>(e)].min_rate);
    }
    return median_of(std::move(values));
}

int convergence_episode(const MetricsLog& log, int window, double tolerance) {
    const int total = static_cast<int>(log.records.size());
    if (total < window) {
        throw InvalidParameterError("run shorter than the convergence window");
    }
    const double final_median = trailing_median(log, window, total);
    const double band = tolerance * std::abs(final_median) + 1e-12;
    for (int last = window; last <= total; ++last) {
        if (std::abs(trailing_median(log, window, last) - final_median) <= band) {
            return log.records[static_cast<std::size_t>(last - 1)].episode;
        }
    }
    return log.records.back().episode;
}

std::vector<CurvePoint> aggregate_curves(const std::vector<MetricsLog>& runs) {
    if (runs.empty()) {
        throw InvalidInputError("no runs to aggregate");
    }
    const std::size_t episodes = runs.front().records.size();
    for (const MetricsLog& run : runs) {
        if (run.records.size() != episodes) {
            throw InvalidInputError("runs differ in episode count; cannot align curves");
        }
    }
    std::vector<CurvePoint> curve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<double> values;
        values.reserve(runs.size());
        for (const MetricsLog& run : runs) {
            values.push_back(run.records[e].min_rate);
        }
        curve[e].episode = runs.front().records[e].episode;
        curve[e].median = median_of(values);
        curve[e].q25 = quantile_of(values, 0.25);
        curve[e].q75 = quantile_of(values, 0.75);
    }
    return curve;
}

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp);
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failure: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

std::string metrics_csv_text(const MetricsLog& log) {
    std::ostringstream out;
    const Eigen::Index num_users =
        log.records.empty() ? 0 : log.records.front().user_rates.size();
    out << "episode,min_rate,mean_step_reward";
    for (Eigen::Index k = 0; k < num_users; ++k) {
        out << ",rate_user_" << k;
    }
    out << "\n";
    for (const EpisodeRecord& r : log.records) {
        out << r.episode << ',' << format_double(r.min_rate) << ','
            << format_double(r.mean_step_reward);
        for (Eigen::Index k = 0; k < r.user_rates.size(); ++k) {
            out << ',' << format_double(r.user_rates(k));
        }
        out << "\n";
    }
    return out.str();
}

void write_metrics_csv(const MetricsLog& log, const std::string& path) {
    write_text_file(path, metrics_csv_text(log));
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ostringstream out;
    out << "episode,median_min_rate,q25_min_rate,q75_min_rate\n";
    for (const CurvePoint& p : curve) {
        out << p.episode << ',' << format_double(p.median) << ',' << format_double(p.q25) << ','
            << format_double(p.q75) << "\n";
    }
    write_text_file(path, out.str());
}

void write_antenna_csv(const std::vector<AntennaSweepRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "M,optimal_min_rate,random_min_rate,optimal_min_sinr,random_min_sinr\n";
    for (const AntennaSweepRow& r : rows) {
        out << r.num_antennas << ',' << format_double(r.optimal_min_rate) << ','
            << format_double(r.random_min_rate) << ',' << format_double(r.optimal_min_sinr)
            << ',' << format_double(r.random_min_sinr) << "\n";
    }
    write_text_file(path, out.str());
}

}  // namespace risopt
