#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "common.hpp"

namespace lanekit {

// Every tunable of the pipeline. tr_lpv defaults to NaN, meaning "derive it
// from the m1 statistics at run time".
struct PipelineConfig {
    int rho = 3;
    int tau = 1;
    int d_max = 64;
    int tr_lrc = 3;
    Real sigma_floor = 1e-4;
    Real lambda_y = 30.0;
    Real tr_y = 4.0;
    Real eps_y = 0.99;
    Real varpi = 3.0;
    Real sigma_s = 300.0;
    Real sigma_r = 0.3;
    int bf_window = 11;
    Real sobel_threshold = 100.0;  // on the 0-255 intensity scale
    int chi = 25;
    Real rho_vote = 1.0;
    Real lambda_x = 10.0;
    Real tr_x = 16.0;
    Real eps_x = 0.99;
    Real sigma_g = 3.5;
    int nu = 1;
    int varsigma = 3;
    Real lambda_g = 1.0;
    Real xi = 0.5;
    Real tr_lpv = std::numeric_limits<Real>::quiet_NaN();  // auto
    int min_lane_sep = 20;
    uint64_t rng_seed = 1;
    bool paper_sign = false;

    int threads = 1;  // CLI-level knob, not a config-file key
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline long long parse_int(const std::string& key, const std::string& value) {
    size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw Error("config: bad integer for " + key + ": '" + value + "'");
    }
    if (pos != value.size()) throw Error("config: bad integer for " + key + ": '" + value + "'");
    return x;
}

inline Real parse_real(const std::string& key, const std::string& value) {
    size_t pos = 0;
    Real x = 0;
    try {
        x = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw Error("config: bad number for " + key + ": '" + value + "'");
    }
    if (pos != value.size()) throw Error("config: bad number for " + key + ": '" + value + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error("config: bad boolean for " + key + ": '" + value + "'");
}

}  // namespace detail

// Applies one key=value entry; shared by the file parser and CLI overrides.
inline void apply_config_entry(PipelineConfig& c, const std::string& key,
                               const std::string& value) {
    if (key == "rho") c.rho = static_cast<int>(detail::parse_int(key, value));
    else if (key == "tau") c.tau = static_cast<int>(detail::parse_int(key, value));
    else if (key == "d_max") c.d_max = static_cast<int>(detail::parse_int(key, value));
    else if (key == "tr_lrc") c.tr_lrc = static_cast<int>(detail::parse_int(key, value));
    else if (key == "sigma_floor") c.sigma_floor = detail::parse_real(key, value);
    else if (key == "lambda_y") c.lambda_y = detail::parse_real(key, value);
    else if (key == "tr_y") c.tr_y = detail::parse_real(key, value);
    else if (key == "eps_y") c.eps_y = detail::parse_real(key, value);
    else if (key == "varpi") c.varpi = detail::parse_real(key, value);
    else if (key == "sigma_s") c.sigma_s = detail::parse_real(key, value);
    else if (key == "sigma_r") c.sigma_r = detail::parse_real(key, value);
    else if (key == "bf_window") c.bf_window = static_cast<int>(detail::parse_int(key, value));
    else if (key == "sobel_threshold") c.sobel_threshold = detail::parse_real(key, value);
    else if (key == "chi") c.chi = static_cast<int>(detail::parse_int(key, value));
    else if (key == "rho_vote") c.rho_vote = detail::parse_real(key, value);
    else if (key == "lambda_x") c.lambda_x = detail::parse_real(key, value);
    else if (key == "tr_x") c.tr_x = detail::parse_real(key, value);
    else if (key == "eps_x") c.eps_x = detail::parse_real(key, value);
    else if (key == "sigma_g") c.sigma_g = detail::parse_real(key, value);
    else if (key == "nu") c.nu = static_cast<int>(detail::parse_int(key, value));
    else if (key == "varsigma") c.varsigma = static_cast<int>(detail::parse_int(key, value));
    else if (key == "lambda_g") c.lambda_g = detail::parse_real(key, value);
    else if (key == "xi") c.xi = detail::parse_real(key, value);
    else if (key == "tr_lpv") {
        if (value == "auto") c.tr_lpv = std::numeric_limits<Real>::quiet_NaN();
        else c.tr_lpv = detail::parse_real(key, value);
    } else if (key == "min_lane_sep") c.min_lane_sep = static_cast<int>(detail::parse_int(key, value));
    else if (key == "rng_seed") c.rng_seed = static_cast<uint64_t>(detail::parse_int(key, value));
    else if (key == "paper_sign") c.paper_sign = detail::parse_bool(key, value);
    else throw Error("config: unknown key '" + key + "'");
}

inline void validate_config(const PipelineConfig& c) {
    auto fail = [](const std::string& m) { throw Error("config: " + m); };
    if (c.rho < 1) fail("rho must be >= 1");
    if (c.tau < 0) fail("tau must be >= 0");
    if (c.d_max < 1) fail("d_max must be >= 1");
    if (c.tr_lrc < 0) fail("tr_lrc must be >= 0");
    if (!(c.sigma_floor > 0)) fail("sigma_floor must be > 0");
    if (c.lambda_y < 0) fail("lambda_y must be >= 0");
    if (!(c.tr_y > 0)) fail("tr_y must be > 0");
    if (!(c.eps_y > 0 && c.eps_y <= 1)) fail("eps_y must be in (0, 1]");
    if (c.varpi < 0) fail("varpi must be >= 0");
    if (!(c.sigma_s > 0)) fail("sigma_s must be > 0");
    if (!(c.sigma_r > 0)) fail("sigma_r must be > 0");
    if (c.bf_window < 1 || c.bf_window % 2 == 0) fail("bf_window must be odd and >= 1");
    if (c.sobel_threshold < 0) fail("sobel_threshold must be >= 0");
    if (c.chi < 0) fail("chi must be >= 0");
    if (!(c.rho_vote > 0)) fail("rho_vote must be > 0");
    if (c.lambda_x < 0) fail("lambda_x must be >= 0");
    if (!(c.tr_x > 0)) fail("tr_x must be > 0");
    if (!(c.eps_x > 0 && c.eps_x <= 1)) fail("eps_x must be in (0, 1]");
    if (!(c.sigma_g > 0)) fail("sigma_g must be > 0");
    if (c.nu < 0) fail("nu must be >= 0");
    if (c.varsigma < 0) fail("varsigma must be >= 0");
    if (c.lambda_g < 0) fail("lambda_g must be >= 0");
    if (c.xi < 0) fail("xi must be >= 0");
    if (!std::isnan(c.tr_lpv) && !(c.tr_lpv < 0)) fail("tr_lpv must be negative (or auto)");
    if (c.min_lane_sep < 0) fail("min_lane_sep must be >= 0");
    if (c.threads < 1) fail("threads must be >= 1");
}

inline PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config: line " + std::to_string(lineno) + " is not key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw Error("config: empty key on line " + std::to_string(lineno));
        apply_config_entry(c, key, value);
    }
    validate_config(c);
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace lanekit
