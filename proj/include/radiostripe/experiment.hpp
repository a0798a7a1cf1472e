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

#include "radiostripe/config.hpp"
#include "radiostripe/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rstripe {

inline constexpr int kSchemaVersion = 1;

// Per-(setup, UE) spectral efficiencies of one scheme, index setup * K + k.
struct SchemeSamples {
    Scheme scheme = Scheme::StripeNlmmse;
    std::vector<double> se;
};

struct ExperimentResult {
    SimulationConfig config;
    std::string label;  // sweep point, empty without a sweep
    std::vector<SchemeSamples> schemes;

    const SchemeSamples& samples(Scheme s) const;
};

// Monte Carlo over config.num_setups drops with
// config.num_channel_realizations_per_setup coherence blocks each. Work is
// fanned out over (setup, block) items; every item draws from its own stream
// keyed on (seed, setup, block), and results are reduced in index order, so
// the output does not depend on the number of workers.
ExperimentResult run_experiment(const SimulationConfig& config, const std::vector<Scheme>& schemes);

struct SweepPoint {
    std::string label;
    SimulationConfig config;
};

// Parses "none", "K=5,10,15,20" or "correlation_model=uncorrelated,gaussian_local_scattering".
std::vector<SweepPoint> expand_sweep(const SimulationConfig& base, const std::string& sweep);

std::vector<Scheme> parse_scheme_list(const std::string& csv);

void write_se_csv(std::ostream& out, const ExperimentResult& result);
void write_cdf_csv(std::ostream& out, const SchemeSamples& samples);
nlohmann::json summary_json(const ExperimentResult& result);

// Writes se.csv, cdf_<scheme>.csv, summary.json and resolved_config.ini into dir.
void write_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

nlohmann::json fronthaul_json(const SimulationConfig& config);

}  // namespace rstripe
