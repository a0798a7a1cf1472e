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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace rstripe;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("defaults describe the reference deployment") {
    const SimulationConfig c;
    CHECK(c.num_aps == 24);
    CHECK(c.antennas_per_ap == 4);
    CHECK(c.num_ues == 10);
    CHECK(c.coherence_block == 200);
    CHECK(c.pilot_length == 20);
    CHECK(c.powers() == std::vector<double>(10, 0.05));
    CHECK(watts_to_dbm(c.noise_power_w) == doctest::Approx(-92.0).epsilon(1e-12));
    CHECK(c.stripe_length_m == 500.0);
    CHECK(c.square_side_m() == 125.0);
    CHECK(c.ap_ue_height_gap_m == 5.0);
    CHECK(c.bandwidth_hz == 20e6);
    CHECK(c.angular_std_rad * 180.0 / M_PI == doctest::Approx(15.0));
    CHECK(c.correlation_model == CorrelationModel::GaussianLocalScattering);
    CHECK(c.prelog() == doctest::Approx(0.9));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("shipped default.ini parses to the built-in defaults") {
    const auto text = read_file(std::string(RSTRIPE_SOURCE_DIR) + "/configs/default.ini");
    const SimulationConfig parsed = parse_config(text);
    CHECK(format_config(parsed) == format_config(SimulationConfig{}));
}

TEST_CASE("format_config round-trips exactly") {
    SimulationConfig c;
    c.num_ues = 3;
    c.ue_power_w = {0.01, 0.1 / 3.0, 0.2};
    c.noise_power_w = dbm_to_watts(-94.3);
    c.angular_std_rad = 0.1234567890123;
    c.correlation_model = CorrelationModel::Uncorrelated;
    c.rng_seed = 18446744073709551557ull;
    c.workers = 3;
    const std::string text = format_config(c);
    const SimulationConfig back = parse_config(text);
    CHECK(back.ue_power_w == c.ue_power_w);
    CHECK(back.noise_power_w == c.noise_power_w);
    CHECK(back.angular_std_rad == c.angular_std_rad);
    CHECK(back.rng_seed == c.rng_seed);
    CHECK(format_config(back) == text);
    CHECK(config_fingerprint(back) == config_fingerprint(c));
}

TEST_CASE("fingerprint ignores the worker count only") {
    SimulationConfig a;
    SimulationConfig b;
    b.workers = 7;
    CHECK(config_fingerprint(a) == config_fingerprint(b));
    b.num_ues = 11;
    CHECK(config_fingerprint(a) != config_fingerprint(b));
}

TEST_CASE("parse_config accepts unit variants") {
    const auto c = parse_config("[radio]\nnoise_power_dbm = -92\n[channel]\nangular_std_deg = 10\n");
    CHECK(c.noise_power_w == doctest::Approx(6.309573444801942e-13).epsilon(1e-12));
    CHECK(c.angular_std_rad == doctest::Approx(10.0 * M_PI / 180.0));
}

TEST_CASE("parse_config rejects bad input") {
    CHECK_THROWS_AS(parse_config("[network]\nnum_antennas = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[network]\nnum_aps = four\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[radio]\nnoise_power_w = 1e-13\nnoise_power_dbm = -90\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[radio]\nue_power_w = 0.1,0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("num_aps = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[network]\nnum_aps = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[radio]\npilot_length = 300\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[radio]\nue_power_w = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[network]\nstripe_length_m = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[channel]\ncorrelation_model = rician\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/radiostripe.ini"), ConfigError);
}
