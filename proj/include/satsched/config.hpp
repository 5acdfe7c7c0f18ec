// SPDX-License-Identifier: Apache-2.0
//
// satsched - user scheduling and power allocation for precoded multi-beam
// satellite downlinks
// Copyright (C) 2026 the satsched contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SATSCHED_CONFIG_HPP
#define SATSCHED_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace satsched {

// configuration / input error, carries the offending field name
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string &message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

enum class PowerRule { EqualSplit, PmaxOverM };
enum class NuFormula { BandwidthConsistent, PaperLiteral };

// All physical and experiment constants. Linear units throughout (W, m);
// bandwidth in MHz and carrier frequency in GHz as is customary for link
// budgets. Defaults are the desk-scale profile; paper_scale() switches to
// the full 110-users-per-beam, 500-slot campaign.
struct ScenarioConfig {
    int num_beams = 7;
    int users_per_beam = 15;
    int window_slots = 50;
    double bandwidth_mhz = 500.0;
    double carrier_freq_ghz = 19.95;
    double max_power_w = 69.98419960022734;         // 18.45 dBW total radiated
    double noise_variance_w = 1.4791083881682073e-12; // -118.3 dBW over full band
    double rx_antenna_diameter_m = 0.6;
    double rx_antenna_efficiency = 0.6;
    double peak_beam_gain_dbi = 44.4;
    double orbit_distance_m = 3.5786e7;
    double qos_rate_per_slot_mbps = 500.0;
    int qos_slots_min = 0;
    int qos_slots_max = 13;
    std::uint64_t rng_seed = 1;
    std::string beam_pattern_source = "parametric"; // "parametric" or "csv:<path>"
    double beam_radius_3db_km = 150.0;
    double sus_alpha = 0.4;
    PowerRule power_rule = PowerRule::EqualSplit;
    NuFormula nu_formula = NuFormula::BandwidthConsistent;
    double sca_epsilon_rel = 1e-3;
    int sca_max_iter = 50;
    double per_beam_power_dbw = 10.0; // informational; only the sum budget is enforced

    static ScenarioConfig desk_default() { return ScenarioConfig{}; }

    static ScenarioConfig paper_scale() {
        ScenarioConfig c;
        c.users_per_beam = 110;
        c.window_slots = 500;
        return c;
    }

    double wavelength_m() const { return 299792458.0 / (carrier_freq_ghz * 1e9); }
};

inline const char *to_string(PowerRule r) {
    return r == PowerRule::EqualSplit ? "equal_split" : "pmax_over_m";
}

inline const char *to_string(NuFormula f) {
    return f == NuFormula::BandwidthConsistent ? "bandwidth_consistent" : "paper_literal";
}

inline void validate(const ScenarioConfig &c) {
    auto require = [](bool ok, const char *field, const std::string &msg) {
        if (!ok)
            throw ConfigError(field, msg);
    };
    require(c.num_beams >= 1, "num_beams", "must be >= 1");
    require(c.users_per_beam >= 0, "users_per_beam", "must be >= 0");
    require(c.window_slots >= 1, "window_slots", "must be >= 1");
    require(c.bandwidth_mhz > 0, "bandwidth_mhz", "must be > 0");
    require(c.carrier_freq_ghz > 0, "carrier_freq_ghz", "must be > 0");
    require(c.max_power_w > 0, "max_power_w", "must be > 0");
    require(c.noise_variance_w > 0, "noise_variance_w", "must be > 0");
    require(c.rx_antenna_diameter_m > 0, "rx_antenna_diameter_m", "must be > 0");
    require(c.rx_antenna_efficiency > 0 && c.rx_antenna_efficiency <= 1.0,
            "rx_antenna_efficiency", "must be in (0, 1]");
    require(c.orbit_distance_m > 0, "orbit_distance_m", "must be > 0");
    require(c.qos_rate_per_slot_mbps >= 0, "qos_rate_per_slot_mbps", "must be >= 0");
    require(c.qos_slots_min >= 0, "qos_slots_min", "must be >= 0");
    require(c.qos_slots_min <= c.qos_slots_max, "qos_slots_min", "must be <= qos_slots_max");
    require(c.qos_slots_max <= c.window_slots, "qos_slots_max", "must be <= window_slots");
    require(c.beam_radius_3db_km > 0, "beam_radius_3db_km", "must be > 0");
    require(c.sus_alpha > 0 && c.sus_alpha <= 1.0, "sus_alpha", "must be in (0, 1]");
    require(c.sca_epsilon_rel > 0, "sca_epsilon_rel", "must be > 0");
    require(c.sca_max_iter >= 1, "sca_max_iter", "must be >= 1");
    require(c.beam_pattern_source == "parametric" ||
                c.beam_pattern_source.rfind("csv:", 0) == 0,
            "beam_pattern_source", "must be 'parametric' or 'csv:<path>'");
}

namespace detail {

inline std::string trim(const std::string &s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string &key, const std::string &v) {
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception &) {
        throw ConfigError(key, "not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError(key, "trailing characters in number: '" + v + "'");
    return d;
}

inline long long parse_int(const std::string &key, const std::string &v) {
    std::size_t pos = 0;
    long long d;
    try {
        d = std::stoll(v, &pos);
    } catch (const std::exception &) {
        throw ConfigError(key, "not an integer: '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError(key, "trailing characters in integer: '" + v + "'");
    return d;
}

} // namespace detail

// Assign one key = value pair; throws ConfigError on unknown keys or bad values.
inline void set_config_key(ScenarioConfig &c, const std::string &key, const std::string &value) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "preset") {
        if (value == "desk")
            c = ScenarioConfig::desk_default();
        else if (value == "paper")
            c = ScenarioConfig::paper_scale();
        else
            throw ConfigError(key, "unknown preset '" + value + "' (desk|paper)");
    } else if (key == "num_beams")
        c.num_beams = static_cast<int>(parse_int(key, value));
    else if (key == "users_per_beam")
        c.users_per_beam = static_cast<int>(parse_int(key, value));
    else if (key == "window_slots")
        c.window_slots = static_cast<int>(parse_int(key, value));
    else if (key == "bandwidth_mhz")
        c.bandwidth_mhz = parse_double(key, value);
    else if (key == "carrier_freq_ghz")
        c.carrier_freq_ghz = parse_double(key, value);
    else if (key == "max_power_w")
        c.max_power_w = parse_double(key, value);
    else if (key == "noise_variance_w")
        c.noise_variance_w = parse_double(key, value);
    else if (key == "rx_antenna_diameter_m")
        c.rx_antenna_diameter_m = parse_double(key, value);
    else if (key == "rx_antenna_efficiency")
        c.rx_antenna_efficiency = parse_double(key, value);
    else if (key == "peak_beam_gain_dbi")
        c.peak_beam_gain_dbi = parse_double(key, value);
    else if (key == "orbit_distance_m")
        c.orbit_distance_m = parse_double(key, value);
    else if (key == "qos_rate_per_slot_mbps")
        c.qos_rate_per_slot_mbps = parse_double(key, value);
    else if (key == "qos_slots_min")
        c.qos_slots_min = static_cast<int>(parse_int(key, value));
    else if (key == "qos_slots_max")
        c.qos_slots_max = static_cast<int>(parse_int(key, value));
    else if (key == "rng_seed")
        c.rng_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "beam_pattern_source")
        c.beam_pattern_source = value;
    else if (key == "beam_radius_3db_km")
        c.beam_radius_3db_km = parse_double(key, value);
    else if (key == "sus_alpha")
        c.sus_alpha = parse_double(key, value);
    else if (key == "power_rule") {
        if (value == "equal_split")
            c.power_rule = PowerRule::EqualSplit;
        else if (value == "pmax_over_m")
            c.power_rule = PowerRule::PmaxOverM;
        else
            throw ConfigError(key, "expected equal_split|pmax_over_m, got '" + value + "'");
    } else if (key == "nu_formula") {
        if (value == "bandwidth_consistent")
            c.nu_formula = NuFormula::BandwidthConsistent;
        else if (value == "paper_literal")
            c.nu_formula = NuFormula::PaperLiteral;
        else
            throw ConfigError(key, "expected bandwidth_consistent|paper_literal, got '" + value + "'");
    } else if (key == "sca_epsilon_rel")
        c.sca_epsilon_rel = parse_double(key, value);
    else if (key == "sca_max_iter")
        c.sca_max_iter = static_cast<int>(parse_int(key, value));
    else if (key == "per_beam_power_dbw")
        c.per_beam_power_dbw = parse_double(key, value);
    else
        throw ConfigError(key, "unknown configuration key");
}

inline std::vector<std::string> config_keys() {
    return {"num_beams",
            "users_per_beam",
            "window_slots",
            "bandwidth_mhz",
            "carrier_freq_ghz",
            "max_power_w",
            "noise_variance_w",
            "rx_antenna_diameter_m",
            "rx_antenna_efficiency",
            "peak_beam_gain_dbi",
            "orbit_distance_m",
            "qos_rate_per_slot_mbps",
            "qos_slots_min",
            "qos_slots_max",
            "rng_seed",
            "beam_pattern_source",
            "beam_radius_3db_km",
            "sus_alpha",
            "power_rule",
            "nu_formula",
            "sca_epsilon_rel",
            "sca_max_iter",
            "per_beam_power_dbw"};
}

// Key/value snapshot of a config, in canonical key order. Doubles are
// printed with enough digits to round-trip.
inline std::vector<std::pair<std::string, std::string>> config_snapshot(const ScenarioConfig &c) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("num_beams", std::to_string(c.num_beams));
    kv.emplace_back("users_per_beam", std::to_string(c.users_per_beam));
    kv.emplace_back("window_slots", std::to_string(c.window_slots));
    kv.emplace_back("bandwidth_mhz", num(c.bandwidth_mhz));
    kv.emplace_back("carrier_freq_ghz", num(c.carrier_freq_ghz));
    kv.emplace_back("max_power_w", num(c.max_power_w));
    kv.emplace_back("noise_variance_w", num(c.noise_variance_w));
    kv.emplace_back("rx_antenna_diameter_m", num(c.rx_antenna_diameter_m));
    kv.emplace_back("rx_antenna_efficiency", num(c.rx_antenna_efficiency));
    kv.emplace_back("peak_beam_gain_dbi", num(c.peak_beam_gain_dbi));
    kv.emplace_back("orbit_distance_m", num(c.orbit_distance_m));
    kv.emplace_back("qos_rate_per_slot_mbps", num(c.qos_rate_per_slot_mbps));
    kv.emplace_back("qos_slots_min", std::to_string(c.qos_slots_min));
    kv.emplace_back("qos_slots_max", std::to_string(c.qos_slots_max));
    kv.emplace_back("rng_seed", std::to_string(c.rng_seed));
    kv.emplace_back("beam_pattern_source", c.beam_pattern_source);
    kv.emplace_back("beam_radius_3db_km", num(c.beam_radius_3db_km));
    kv.emplace_back("sus_alpha", num(c.sus_alpha));
    kv.emplace_back("power_rule", to_string(c.power_rule));
    kv.emplace_back("nu_formula", to_string(c.nu_formula));
    kv.emplace_back("sca_epsilon_rel", num(c.sca_epsilon_rel));
    kv.emplace_back("sca_max_iter", std::to_string(c.sca_max_iter));
    kv.emplace_back("per_beam_power_dbw", num(c.per_beam_power_dbw));
    return kv;
}

// Flat key = value file; '#' starts a comment. A 'preset' line, if present,
// is applied first regardless of position.
inline ScenarioConfig parse_config_text(std::istream &in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        pairs.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    ScenarioConfig c;
    for (const auto &[k, v] : pairs)
        if (k == "preset")
            set_config_key(c, k, v);
    for (const auto &[k, v] : pairs)
        if (k != "preset")
            set_config_key(c, k, v);
    return c;
}

inline ScenarioConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path + "'");
    return parse_config_text(in);
}

// Environment variables SATSCHED_<KEY> (key uppercased) override any config
// key. The lookup function is injectable for tests; defaults to getenv.
inline void apply_env_overrides(
    ScenarioConfig &c,
    const std::function<const char *(const std::string &)> &getvar =
        [](const std::string &name) { return std::getenv(name.c_str()); }) {
    for (const auto &key : config_keys()) {
        std::string var = "SATSCHED_";
        for (char ch : key)
            var += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (const char *v = getvar(var))
            set_config_key(c, key, v);
    }
}

} // namespace satsched

#endif
