#include "motkit/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "motkit/errors.hpp"

namespace motkit {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

double as_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigInvalid(key + ": not a number: '" + value + "'");
    }
    return out;
}

int as_int(const std::string& key, const std::string& value) {
    const double v = as_real(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigInvalid(key + ": not an integer: '" + value + "'");
    }
    return i;
}

std::uint64_t as_uint64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigInvalid(key + ": not an unsigned integer: '" + value + "'");
    }
    return out;
}

bool as_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigInvalid(key + ": expected 0/1/true/false, got '" + value + "'");
}

}  // namespace

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    AssociationConfig& assoc = cfg.tracker.assoc;
    CoffConfig& coff = cfg.tracker.coff;
    KalmanConfig& kalman = cfg.tracker.kalman;

    if (key == "tracker.buffer_frames") {
        cfg.tracker.buffer_frames = as_int(key, value);
    } else if (key == "tracker.n_init") {
        cfg.tracker.n_init = as_int(key, value);
    } else if (key == "tracker.cmc_enabled") {
        cfg.tracker.cmc_enabled = as_bool(key, value);
    } else if (key == "assoc.high_conf_threshold") {
        assoc.high_conf_threshold = as_real(key, value);
    } else if (key == "assoc.low_conf_threshold") {
        assoc.low_conf_threshold = as_real(key, value);
    } else if (key == "assoc.detection_threshold") {
        assoc.detection_threshold = as_real(key, value);
    } else if (key == "assoc.match_cost_threshold") {
        assoc.match_cost_threshold = as_real(key, value);
    } else if (key == "assoc.second_stage_iou_threshold") {
        assoc.second_stage_iou_threshold = as_real(key, value);
    } else if (key == "assoc.appearance_sim_threshold") {
        assoc.appearance_sim_threshold = as_real(key, value);
    } else if (key == "assoc.linear_iou_threshold") {
        assoc.linear_iou_threshold = as_real(key, value);
    } else if (key == "coff.beta") {
        coff.beta = as_real(key, value);
    } else if (key == "coff.theta_iou") {
        coff.theta_iou = as_real(key, value);
    } else if (key == "coff.alpha") {
        coff.alpha = as_real(key, value);
    } else if (key == "kalman.position_weight") {
        kalman.position_weight = as_real(key, value);
    } else if (key == "kalman.velocity_weight") {
        kalman.velocity_weight = as_real(key, value);
    } else if (key == "kalman.dt") {
        kalman.dt = as_real(key, value);
    } else if (key == "cmc.ransac_iterations") {
        cfg.cmc.ransac_iterations = as_int(key, value);
    } else if (key == "cmc.inlier_threshold") {
        cfg.cmc.inlier_threshold = as_real(key, value);
    } else if (key == "cmc.min_inlier_fraction") {
        cfg.cmc.min_inlier_fraction = as_real(key, value);
    } else if (key == "cmc.seed") {
        cfg.cmc.seed = as_uint64(key, value);
    } else if (key == "interp.max_gap") {
        cfg.interpolation_max_gap = as_int(key, value);
    } else {
        throw ConfigInvalid("unknown config key: '" + key + "'");
    }
}

void validate_config(const RunConfig& cfg) {
    const auto unit = [](const char* key, double v) {
        if (v < 0.0 || v > 1.0) {
            throw ConfigInvalid(std::string(key) + " must be in [0, 1], got " +
                                std::to_string(v));
        }
    };
    const auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) {
            throw ConfigInvalid(std::string(key) + " must be > 0, got " + std::to_string(v));
        }
    };

    if (cfg.tracker.buffer_frames < 1) throw ConfigInvalid("tracker.buffer_frames must be >= 1");
    if (cfg.tracker.n_init < 1) throw ConfigInvalid("tracker.n_init must be >= 1");

    const AssociationConfig& a = cfg.tracker.assoc;
    unit("assoc.high_conf_threshold", a.high_conf_threshold);
    unit("assoc.low_conf_threshold", a.low_conf_threshold);
    unit("assoc.detection_threshold", a.detection_threshold);
    unit("assoc.match_cost_threshold", a.match_cost_threshold);
    unit("assoc.second_stage_iou_threshold", a.second_stage_iou_threshold);
    unit("assoc.appearance_sim_threshold", a.appearance_sim_threshold);
    unit("assoc.linear_iou_threshold", a.linear_iou_threshold);
    if (a.low_conf_threshold > a.detection_threshold) {
        throw ConfigInvalid("assoc.low_conf_threshold must not exceed assoc.detection_threshold");
    }

    positive("coff.beta", cfg.tracker.coff.beta);
    unit("coff.theta_iou", cfg.tracker.coff.theta_iou);
    if (cfg.tracker.coff.alpha < 0.0 || cfg.tracker.coff.alpha >= 1.0) {
        throw ConfigInvalid("coff.alpha must be in [0, 1)");
    }

    positive("kalman.position_weight", cfg.tracker.kalman.position_weight);
    positive("kalman.velocity_weight", cfg.tracker.kalman.velocity_weight);
    positive("kalman.dt", cfg.tracker.kalman.dt);

    if (cfg.cmc.ransac_iterations < 1) throw ConfigInvalid("cmc.ransac_iterations must be >= 1");
    positive("cmc.inlier_threshold", cfg.cmc.inlier_threshold);
    if (cfg.cmc.min_inlier_fraction <= 0.0 || cfg.cmc.min_inlier_fraction > 1.0) {
        throw ConfigInvalid("cmc.min_inlier_fraction must be in (0, 1]");
    }

    if (cfg.interpolation_max_gap < 0) throw ConfigInvalid("interp.max_gap must be >= 0");
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file: " + path);

    RunConfig cfg;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string stripped = strip(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigInvalid(path + ":" + std::to_string(line_number) +
                                ": expected key=value, got '" + stripped + "'");
        }
        apply_config_override(cfg, strip(stripped.substr(0, eq)), strip(stripped.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

std::string format_run_config(const RunConfig& cfg) {
    char line[128];
    std::string out;
    const auto real = [&](const char* key, double v) {
        std::snprintf(line, sizeof(line), "%s=%.6f\n", key, v);
        out += line;
    };
    const auto integer = [&](const char* key, long long v) {
        std::snprintf(line, sizeof(line), "%s=%lld\n", key, v);
        out += line;
    };

    integer("tracker.buffer_frames", cfg.tracker.buffer_frames);
    integer("tracker.n_init", cfg.tracker.n_init);
    integer("tracker.cmc_enabled", cfg.tracker.cmc_enabled ? 1 : 0);
    real("assoc.high_conf_threshold", cfg.tracker.assoc.high_conf_threshold);
    real("assoc.low_conf_threshold", cfg.tracker.assoc.low_conf_threshold);
    real("assoc.detection_threshold", cfg.tracker.assoc.detection_threshold);
    real("assoc.match_cost_threshold", cfg.tracker.assoc.match_cost_threshold);
    real("assoc.second_stage_iou_threshold", cfg.tracker.assoc.second_stage_iou_threshold);
    real("assoc.appearance_sim_threshold", cfg.tracker.assoc.appearance_sim_threshold);
    real("assoc.linear_iou_threshold", cfg.tracker.assoc.linear_iou_threshold);
    real("coff.beta", cfg.tracker.coff.beta);
    real("coff.theta_iou", cfg.tracker.coff.theta_iou);
    real("coff.alpha", cfg.tracker.coff.alpha);
    real("kalman.position_weight", cfg.tracker.kalman.position_weight);
    real("kalman.velocity_weight", cfg.tracker.kalman.velocity_weight);
    real("kalman.dt", cfg.tracker.kalman.dt);
    integer("cmc.ransac_iterations", cfg.cmc.ransac_iterations);
    real("cmc.inlier_threshold", cfg.cmc.inlier_threshold);
    real("cmc.min_inlier_fraction", cfg.cmc.min_inlier_fraction);
    std::snprintf(line, sizeof(line), "cmc.seed=%llu\n",
                  static_cast<unsigned long long>(cfg.cmc.seed));
    out += line;
    integer("interp.max_gap", cfg.interpolation_max_gap);
    return out;
}

}  // namespace motkit
