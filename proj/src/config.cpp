// SPDX-License-Identifier: Apache-2.0
//
// radiostripe: uplink simulator for cell-free massive MIMO on a radio stripe
// Copyright (C) 2026 The radiostripe authors
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

#include "radiostripe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace rstripe {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double to_double(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + t + "'");
    }
    return value;
}

template <typename Int>
Int to_integer(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + t + "'");
    }
    return value;
}

std::vector<double> to_double_list(const std::string& key, std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                             : comma - start);
        out.push_back(to_double(key, piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(CorrelationModel model) {
    switch (model) {
        case CorrelationModel::GaussianLocalScattering: return "gaussian_local_scattering";
        case CorrelationModel::Uncorrelated: return "uncorrelated";
    }
    return "unknown";
}

CorrelationModel parse_correlation_model(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "gaussian_local_scattering" || t == "gaussianlocalscattering" || t == "correlated") {
        return CorrelationModel::GaussianLocalScattering;
    }
    if (t == "uncorrelated") return CorrelationModel::Uncorrelated;
    throw ConfigError("unknown correlation model '" + std::string(text) + "'");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::vector<double> SimulationConfig::powers() const {
    if (ue_power_w.size() == 1) {
        return std::vector<double>(static_cast<std::size_t>(std::max(num_ues, 0)), ue_power_w.front());
    }
    return ue_power_w;
}

void SimulationConfig::validate() const {
    if (num_aps < 2) throw ConfigError("num_aps must be at least 2");
    if (antennas_per_ap < 1) throw ConfigError("antennas_per_ap must be at least 1");
    if (num_ues < 1) throw ConfigError("num_ues must be at least 1");
    if (pilot_length < 1) throw ConfigError("pilot_length must be at least 1");
    if (pilot_length > coherence_block) {
        throw ConfigError("pilot_length must not exceed coherence_block");
    }
    if (ue_power_w.empty()) throw ConfigError("ue_power_w must not be empty");
    if (ue_power_w.size() != 1 && ue_power_w.size() != static_cast<std::size_t>(num_ues)) {
        throw ConfigError("ue_power_w must hold one value or exactly num_ues values");
    }
    for (double p : ue_power_w) {
        if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("UE powers must be positive");
    }
    if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w)) {
        throw ConfigError("noise power must be positive");
    }
    if (!(stripe_length_m > 0.0)) throw ConfigError("stripe_length_m must be positive");
    if (!(ap_ue_height_gap_m > 0.0)) throw ConfigError("ap_ue_height_gap_m must be positive");
    if (!(angular_std_rad > 0.0)) throw ConfigError("angular standard deviation must be positive");
    if (num_setups < 1) throw ConfigError("num_setups must be at least 1");
    if (num_channel_realizations_per_setup < 1) {
        throw ConfigError("realizations_per_setup must be at least 1");
    }
    if (workers < 0) throw ConfigError("workers must be non-negative");
}

SimulationConfig parse_config(std::string_view text) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    SimulationConfig cfg;
    std::set<std::string> seen;
    bool noise_set = false;
    bool angle_set = false;

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config key '" + section + "' must live inside a [section]");
        }
        for (const auto& [name, node] : body) {
            const std::string key = section + "." + name;
            const std::string value = node.data();
            if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");

            if (key == "network.num_aps") cfg.num_aps = to_integer<int>(key, value);
            else if (key == "network.antennas_per_ap") cfg.antennas_per_ap = to_integer<int>(key, value);
            else if (key == "network.num_ues") cfg.num_ues = to_integer<int>(key, value);
            else if (key == "network.stripe_length_m") cfg.stripe_length_m = to_double(key, value);
            else if (key == "network.ap_ue_height_gap_m") cfg.ap_ue_height_gap_m = to_double(key, value);
            else if (key == "network.carrier_freq_hz") cfg.carrier_freq_hz = to_double(key, value);
            else if (key == "network.bandwidth_hz") cfg.bandwidth_hz = to_double(key, value);
            else if (key == "radio.ue_power_w") cfg.ue_power_w = to_double_list(key, value);
            else if (key == "radio.noise_power_w" || key == "radio.noise_power_dbm") {
                if (noise_set) throw ConfigError("give only one of noise_power_w and noise_power_dbm");
                noise_set = true;
                const double v = to_double(key, value);
                cfg.noise_power_w = key == "radio.noise_power_w" ? v : dbm_to_watts(v);
            } else if (key == "radio.coherence_block") cfg.coherence_block = to_integer<int>(key, value);
            else if (key == "radio.pilot_length") cfg.pilot_length = to_integer<int>(key, value);
            else if (key == "channel.correlation_model") {
                cfg.correlation_model = parse_correlation_model(value);
            } else if (key == "channel.angular_std_rad" || key == "channel.angular_std_deg") {
                if (angle_set) throw ConfigError("give only one of angular_std_rad and angular_std_deg");
                angle_set = true;
                const double v = to_double(key, value);
                cfg.angular_std_rad = key == "channel.angular_std_rad" ? v : v * std::numbers::pi / 180.0;
            } else if (key == "simulation.num_setups") cfg.num_setups = to_integer<int>(key, value);
            else if (key == "simulation.realizations_per_setup") {
                cfg.num_channel_realizations_per_setup = to_integer<int>(key, value);
            } else if (key == "simulation.seed") cfg.rng_seed = to_integer<std::uint64_t>(key, value);
            else if (key == "simulation.workers") cfg.workers = to_integer<int>(key, value);
            else throw ConfigError("unknown config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const SimulationConfig& c) {
    std::ostringstream out;
    std::string powers;
    for (std::size_t i = 0; i < c.ue_power_w.size(); ++i) {
        if (i) powers += ",";
        powers += format_double(c.ue_power_w[i]);
    }
    out << "[network]\n"
        << "num_aps = " << c.num_aps << "\n"
        << "antennas_per_ap = " << c.antennas_per_ap << "\n"
        << "num_ues = " << c.num_ues << "\n"
        << "stripe_length_m = " << format_double(c.stripe_length_m) << "\n"
        << "ap_ue_height_gap_m = " << format_double(c.ap_ue_height_gap_m) << "\n"
        << "carrier_freq_hz = " << format_double(c.carrier_freq_hz) << "\n"
        << "bandwidth_hz = " << format_double(c.bandwidth_hz) << "\n"
        << "\n[radio]\n"
        << "ue_power_w = " << powers << "\n"
        << "noise_power_w = " << format_double(c.noise_power_w) << "\n"
        << "coherence_block = " << c.coherence_block << "\n"
        << "pilot_length = " << c.pilot_length << "\n"
        << "\n[channel]\n"
        << "correlation_model = " << to_string(c.correlation_model) << "\n"
        << "angular_std_rad = " << format_double(c.angular_std_rad) << "\n"
        << "\n[simulation]\n"
        << "num_setups = " << c.num_setups << "\n"
        << "realizations_per_setup = " << c.num_channel_realizations_per_setup << "\n"
        << "seed = " << c.rng_seed << "\n"
        << "workers = " << c.workers << "\n";
    return out.str();
}

std::uint64_t config_fingerprint(const SimulationConfig& config) {
    SimulationConfig canonical = config;
    canonical.workers = 0;  // results do not depend on the pool size
    const std::string text = format_config(canonical);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace rstripe
