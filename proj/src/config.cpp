#include "risopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <openssl/evp.h>
#include <sstream>

#include <json.hpp>

#include "risopt/errors.hpp"

namespace risopt {

using nlohmann::json;

// Single rounding: folding the milliwatt offset into the exponent keeps the
// result correctly rounded (23 dBm lands exactly on 0.19952623149688797 W).
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace {

// Every getter validates the JSON type so config mistakes fail with the
// offending key in the message rather than a bare type error.
template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInputError("config key '" + key + "': " + e.what());
    }
}

std::vector<int> int_or_list(const json& j, const std::string& key,
                             const std::vector<int>& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (v.is_array()) {
        return v.get<std::vector<int>>();
    }
    return {v.get<int>()};
}

void parse_scenario(const json& j, ScenarioParams& s) {
    PlacementConfig& p = s.placement;
    p.num_antennas = get_or(j, "num_antennas", p.num_antennas);
    p.num_users = get_or(j, "num_users", p.num_users);
    p.num_ris = get_or(j, "num_ris", p.num_ris);
    if (j.contains("elements_per_ris")) {
        const json& v = j.at("elements_per_ris");
        if (v.is_array()) {
            p.elements_per_ris = v.get<std::vector<int>>();
        } else {
            p.uniform_elements = v.get<int>();
            p.elements_per_ris.clear();
        }
    }
    if (j.contains("bs_position")) {
        const auto pos = j.at("bs_position").get<std::vector<double>>();
        if (pos.size() != 3) {
            throw InvalidInputError("config key 'bs_position': expected 3 coordinates");
        }
        p.bs_position = Eigen::Vector3d(pos[0], pos[1], pos[2]);
    }
    p.ris_radius = get_or(j, "ris_radius", p.ris_radius);
    p.user_radius = get_or(j, "user_radius", p.user_radius);
    p.ris_height = get_or(j, "ris_height", p.ris_height);
    p.user_height = get_or(j, "user_height", p.user_height);
    p.random_angles = get_or(j, "random_angles", p.random_angles);

    FadingParams& f = s.fading;
    f.eta = get_or(j, "eta", f.eta);
    f.zeta = get_or(j, "path_loss_exponent", f.zeta);
    f.zeta_user_ris = get_or(j, "path_loss_exponent_user_ris", f.zeta_user_ris);
    f.zeta_ris_bs = get_or(j, "path_loss_exponent_ris_bs", f.zeta_ris_bs);
    f.rician_k = get_or(j, "rician_k", f.rician_k);
    f.sigma_bs_sq = get_or(j, "sigma_bs_sq", f.sigma_bs_sq);
    if (j.contains("sigma_ris_sq")) {
        const json& v = j.at("sigma_ris_sq");
        if (v.is_array()) {
            const auto values = v.get<std::vector<double>>();
            f.sigma_ris_sq = Eigen::Map<const Eigen::VectorXd>(
                values.data(), static_cast<Eigen::Index>(values.size()));
        } else {
            f.sigma_ris_sq = Eigen::VectorXd::Constant(p.num_ris, v.get<double>());
        }
    } else {
        f.sigma_ris_sq = Eigen::VectorXd::Constant(p.num_ris, 1e-7);
    }

    if (j.contains("p_max_dbm") && j.contains("p_max_watts")) {
        throw InvalidInputError("config: give p_max_dbm or p_max_watts, not both");
    }
    if (j.contains("p_max_dbm")) {
        s.p_max = dbm_to_watts(j.at("p_max_dbm").get<double>());
    } else {
        s.p_max = get_or(j, "p_max_watts", s.p_max);
    }
    s.ris_gain_db = get_or(j, "ris_gain_db", s.ris_gain_db);
    s.ris_gain_amplitude_reading =
        get_or(j, "ris_gain_amplitude_reading", s.ris_gain_amplitude_reading);
}

void parse_hyperparams(const json& j, AgentHyperparams& h) {
    h.learning_rate = get_or(j, "learning_rate", h.learning_rate);
    h.gamma = get_or(j, "gamma", h.gamma);
    h.tau = get_or(j, "tau", h.tau);
    h.batch_size = get_or<int>(j, "batch_size", static_cast<int>(h.batch_size));
    h.hidden_sizes = get_or(j, "hidden_sizes", h.hidden_sizes);
    h.entropy_coefficient = get_or(j, "entropy_coefficient", h.entropy_coefficient);
    h.auto_entropy = get_or(j, "auto_entropy", h.auto_entropy);
    h.exploration_noise_std = get_or(j, "exploration_noise_std", h.exploration_noise_std);
    h.policy_delay = get_or(j, "policy_delay", h.policy_delay);
    h.target_noise_std = get_or(j, "target_noise_std", h.target_noise_std);
    h.target_noise_clip = get_or(j, "target_noise_clip", h.target_noise_clip);
}

json scenario_json(const ScenarioParams& s) {
    json j;
    const PlacementConfig& p = s.placement;
    j["num_antennas"] = p.num_antennas;
    j["num_users"] = p.num_users;
    j["num_ris"] = p.num_ris;
    j["elements_per_ris"] = p.resolved_elements();
    j["bs_position"] = {p.bs_position.x(), p.bs_position.y(), p.bs_position.z()};
    j["ris_radius"] = p.ris_radius;
    j["user_radius"] = p.user_radius;
    j["ris_height"] = p.ris_height;
    j["user_height"] = p.user_height;
    j["random_angles"] = p.random_angles;
    const FadingParams& f = s.fading;
    j["eta"] = f.eta;
    j["path_loss_exponent"] = f.zeta;
    j["path_loss_exponent_user_ris"] = f.zeta_user_ris;
    j["path_loss_exponent_ris_bs"] = f.zeta_ris_bs;
    j["rician_k"] = f.rician_k;
    j["sigma_bs_sq"] = f.sigma_bs_sq;
    j["sigma_ris_sq"] = std::vector<double>(f.sigma_ris_sq.begin(), f.sigma_ris_sq.end());
    j["p_max_watts"] = s.p_max;
    j["ris_gain_db"] = s.ris_gain_db;
    j["ris_gain_amplitude_reading"] = s.ris_gain_amplitude_reading;
    return j;
}

json hyperparams_json(const AgentHyperparams& h) {
    json j;
    j["learning_rate"] = h.learning_rate;
    j["gamma"] = h.gamma;
    j["tau"] = h.tau;
    j["batch_size"] = static_cast<int>(h.batch_size);
    j["hidden_sizes"] = h.hidden_sizes;
    j["entropy_coefficient"] = h.entropy_coefficient;
    j["auto_entropy"] = h.auto_entropy;
    j["exploration_noise_std"] = h.exploration_noise_std;
    j["policy_delay"] = h.policy_delay;
    j["target_noise_std"] = h.target_noise_std;
    j["target_noise_clip"] = h.target_noise_clip;
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("config parse failure: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("scenario")) {
        parse_scenario(j.at("scenario"), cfg.scenario);
    } else {
        cfg.scenario.fading = FadingParams::defaults(cfg.scenario.placement.num_ris);
    }
    cfg.experiment = get_or(j, "experiment", cfg.experiment);
    cfg.agent = get_or(j, "agent", cfg.agent);
    cfg.seeds = get_or(j, "seeds", cfg.seeds);
    cfg.episodes = get_or(j, "episodes", cfg.episodes);
    cfg.warmup_episodes = get_or(j, "warmup_episodes", cfg.warmup_episodes);
    cfg.buffer_capacity = get_or<std::size_t>(j, "buffer_capacity", cfg.buffer_capacity);
    if (j.contains("episode")) {
        const json& e = j.at("episode");
        cfg.episode.steps_per_episode =
            get_or(e, "steps_per_episode", cfg.episode.steps_per_episode);
        cfg.episode.redraw_channels_each_episode =
            get_or(e, "redraw_channels_each_episode", cfg.episode.redraw_channels_each_episode);
        cfg.episode.normalize_observations =
            get_or(e, "normalize_observations", cfg.episode.normalize_observations);
    }
    if (j.contains("hyperparams")) {
        parse_hyperparams(j.at("hyperparams"), cfg.hyperparams);
    }
    cfg.antenna_counts = get_or(j, "antenna_counts", cfg.antenna_counts);
    cfg.learning_rates = get_or(j, "learning_rates", cfg.learning_rates);
    cfg.study_agents = get_or(j, "study_agents", cfg.study_agents);
    if (j.contains("scale_cases")) {
        cfg.scale_cases.clear();
        for (const json& c : j.at("scale_cases")) {
            ScaleCase sc;
            sc.num_users = c.at("num_users").get<int>();
            sc.elements_per_ris = c.at("elements_per_ris").get<int>();
            cfg.scale_cases.push_back(sc);
        }
    }
    cfg.scale_learning_rate = get_or(j, "scale_learning_rate", cfg.scale_learning_rate);
    cfg.scale_episodes = get_or(j, "scale_episodes", cfg.scale_episodes);
    cfg.action_dim_warning_cap = get_or(j, "action_dim_warning_cap", cfg.action_dim_warning_cap);
    cfg.early_stop = get_or(j, "early_stop", cfg.early_stop);
    cfg.early_stop_window = get_or(j, "early_stop_window", cfg.early_stop_window);
    cfg.early_stop_tolerance = get_or(j, "early_stop_tolerance", cfg.early_stop_tolerance);

    if (cfg.scenario.fading.sigma_ris_sq.size() == 0) {
        cfg.scenario.fading.sigma_ris_sq =
            Eigen::VectorXd::Constant(cfg.scenario.placement.num_ris, 1e-7);
    }
    return cfg;
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["experiment"] = experiment;
    j["agent"] = agent;
    j["seeds"] = seeds;
    j["episodes"] = episodes;
    j["warmup_episodes"] = warmup_episodes;
    j["buffer_capacity"] = buffer_capacity;
    j["scenario"] = scenario_json(scenario);
    j["episode"] = {{"steps_per_episode", episode.steps_per_episode},
                    {"redraw_channels_each_episode", episode.redraw_channels_each_episode},
                    {"normalize_observations", episode.normalize_observations}};
    j["hyperparams"] = hyperparams_json(hyperparams);
    j["antenna_counts"] = antenna_counts;
    j["learning_rates"] = learning_rates;
    j["study_agents"] = study_agents;
    json cases = json::array();
    for (const ScaleCase& c : scale_cases) {
        cases.push_back({{"num_users", c.num_users}, {"elements_per_ris", c.elements_per_ris}});
    }
    j["scale_cases"] = cases;
    j["scale_learning_rate"] = scale_learning_rate;
    j["scale_episodes"] = scale_episodes;
    j["action_dim_warning_cap"] = action_dim_warning_cap;
    j["early_stop"] = early_stop;
    j["early_stop_window"] = early_stop_window;
    j["early_stop_tolerance"] = early_stop_tolerance;
    return j.dump(2);  // nlohmann::json objects iterate in sorted key order
}

std::string ExperimentConfig::hash() const {
    const std::string text = canonical_json();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw NumericError("SHA-256 digest failure");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kExperiments = {"train", "antenna_sweep", "lr_study",
                                                          "scale_study"};
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
        throw InvalidParameterError("unknown experiment kind: " + experiment);
    }
    static const std::vector<std::string> kAgents = {"sac", "ddpg", "td3", "random"};
    if (std::find(kAgents.begin(), kAgents.end(), agent) == kAgents.end()) {
        throw InvalidParameterError("unknown agent: " + agent);
    }
    if (seeds.empty()) {
        throw InvalidParameterError("seed list must be non-empty");
    }
    if (episodes < 1 || scale_episodes < 1) {
        throw InvalidParameterError("episode budgets must be at least 1");
    }
    if (warmup_episodes < 0) {
        throw InvalidParameterError("warmup_episodes must be nonnegative");
    }
    scenario.validate();
    episode.validate();
    hyperparams.validate(buffer_capacity);
    for (const std::string& name : study_agents) {
        if (std::find(kAgents.begin(), kAgents.end(), name) == kAgents.end()) {
            throw InvalidParameterError("unknown study agent: " + name);
        }
    }
    if (antenna_counts.empty() ||
        std::any_of(antenna_counts.begin(), antenna_counts.end(), [](int m) { return m < 1; })) {
        throw InvalidParameterError("antenna_counts must be positive");
    }
    if (learning_rates.empty() || std::any_of(learning_rates.begin(), learning_rates.end(),
                                              [](double lr) { return lr <= 0.0; })) {
        throw InvalidParameterError("learning_rates must be positive");
    }
    if (scale_cases.empty()) {
        throw InvalidParameterError("scale_cases must be non-empty");
    }
    for (const ScaleCase& c : scale_cases) {
        if (c.num_users < 1 || c.elements_per_ris < 1) {
            throw InvalidParameterError("scale case fields must be positive");
        }
    }
    if (scale_learning_rate <= 0.0) {
        throw InvalidParameterError("scale_learning_rate must be positive");
    }
    if (early_stop_window < 1 || early_stop_tolerance <= 0.0) {
        throw InvalidParameterError("early-stop parameters must be positive");
    }
}

}  // namespace risopt
