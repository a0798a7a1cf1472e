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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rstripe {

enum class CorrelationModel { GaussianLocalScattering, Uncorrelated };

std::string to_string(CorrelationModel model);
CorrelationModel parse_correlation_model(std::string_view text);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// All scalar parameters of one simulation. Defaults describe the reference
// deployment: 24 four-antenna APs on a 500 m stripe around a square room,
// 10 UEs, 50 mW per UE, -92 dBm noise, 200-symbol coherence blocks with 20
// pilot symbols.
struct SimulationConfig {
    int num_aps = 24;
    int antennas_per_ap = 4;
    int num_ues = 10;
    int coherence_block = 200;
    int pilot_length = 20;

    // One entry broadcasts to every UE, otherwise exactly num_ues entries.
    std::vector<double> ue_power_w{0.05};
    double noise_power_w = dbm_to_watts(-92.0);

    double stripe_length_m = 500.0;
    double ap_ue_height_gap_m = 5.0;
    double carrier_freq_hz = 2e9;  // informational
    double bandwidth_hz = 20e6;    // informational

    double angular_std_rad = 0.2617993877991494;  // 15 degrees
    CorrelationModel correlation_model = CorrelationModel::GaussianLocalScattering;

    int num_setups = 50;
    int num_channel_realizations_per_setup = 200;
    std::uint64_t rng_seed = 1;
    int workers = 0;  // 0 = hardware concurrency

    double square_side_m() const { return stripe_length_m / 4.0; }
    double prelog() const {
        return 1.0 - static_cast<double>(pilot_length) / static_cast<double>(coherence_block);
    }

    // Per-UE transmit powers expanded to num_ues entries.
    std::vector<double> powers() const;

    // Throws ConfigError on the first violated invariant.
    void validate() const;
};

// Flat key-value file with [sections]. Unknown keys are rejected.
SimulationConfig parse_config(std::string_view text);
SimulationConfig load_config(const std::string& path);

// Serializes every field with round-trip precision; parse_config of the
// result reproduces the config exactly.
std::string format_config(const SimulationConfig& config);

// Stable 64-bit FNV-1a of format_config, used to tag outputs.
std::uint64_t config_fingerprint(const SimulationConfig& config);

}  // namespace rstripe
