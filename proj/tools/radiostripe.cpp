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
#include "radiostripe/experiment.hpp"
#include "radiostripe/metrics.hpp"
#include "radiostripe/selftest.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

rstripe::SimulationConfig load_or_default(const std::string& path) {
    return path.empty() ? rstripe::SimulationConfig{} : rstripe::load_config(path);
}

int cmd_run(const std::string& config_path, const std::string& schemes_csv, const std::string& sweep,
            std::optional<std::uint64_t> seed, std::optional<int> workers, const std::string& out_dir) {
    rstripe::SimulationConfig base = load_or_default(config_path);
    if (seed) base.rng_seed = *seed;
    if (workers) base.workers = *workers;
    base.validate();
    const auto schemes = rstripe::parse_scheme_list(schemes_csv);
    const auto points = rstripe::expand_sweep(base, sweep);
    const std::filesystem::path root(out_dir);

    nlohmann::json index = nlohmann::json::array();
    for (const auto& point : points) {
        const auto t0 = std::chrono::steady_clock::now();
        rstripe::ExperimentResult result = rstripe::run_experiment(point.config, schemes);
        result.label = point.label;
        const auto dir = point.label.empty() ? root : root / point.label;
        rstripe::write_outputs(dir, result);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const auto summary = rstripe::summary_json(result);
        std::cout << (point.label.empty() ? std::string("run") : point.label) << " (" << secs << " s) -> "
                  << dir.string() << "\n";
        for (const auto& entry : result.schemes) {
            const auto& s = summary[rstripe::to_string(entry.scheme)];
            std::printf("  %-14s median SE %.4f  5%% SE %.4f  (%zu samples)\n",
                        rstripe::to_string(entry.scheme).c_str(), s["median_se"].get<double>(),
                        s["p05_se"].get<double>(), entry.se.size());
        }
        if (!point.label.empty()) index.push_back({{"sweep_point", point.label}, {"directory", point.label}});
    }
    if (!index.empty()) {
        std::ofstream f(root / "sweep.json");
        f << nlohmann::json{{"schema_version", rstripe::kSchemaVersion}, {"points", index}}.dump(2) << '\n';
    }
    return 0;
}

int cmd_fronthaul(const std::string& config_path, bool as_json) {
    const rstripe::SimulationConfig c = load_or_default(config_path);
    const auto j = rstripe::fronthaul_json(c);
    if (as_json) {
        std::cout << nlohmann::json{{"schema_version", rstripe::kSchemaVersion}, {"fronthaul", j}}.dump(2) << '\n';
        return 0;
    }
    std::printf("real-valued scalars per coherence block (N=%d, L=%d, K=%d, tau_c=%d, tau_p=%d)\n",
                c.antennas_per_ap, c.num_aps, c.num_ues, c.coherence_block, c.pilot_length);
    std::printf("  lmmse_l4 to CPU:           %lld\n", static_cast<long long>(j["l4"].get<std::int64_t>()));
    std::printf("  stripe_nlmmse per segment: %lld\n", static_cast<long long>(j["stripe"].get<std::int64_t>()));
    std::printf("  reduction on CPU link:     %.2f%%\n", 100.0 * j["reduction"].get<double>());
    return 0;
}

int cmd_selftest(bool inject_fault) {
    rstripe::SelftestOptions opts;
    opts.inject_fault = inject_fault;
    const auto checks = rstripe::run_selftest(opts);
    bool ok = true;
    for (const auto& c : checks) {
        std::printf("[%s] %s (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink Monte Carlo for cell-free massive MIMO on a radio stripe"};
    app.require_subcommand(1);

    std::string config_path;
    std::string schemes = "all";
    std::string sweep = "none";
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    auto* run = app.add_subcommand("run", "Simulate the selected schemes and write SE/CDF CSVs and a JSON summary");
    run->add_option("--config", config_path, "Config file (built-in defaults when omitted)")->check(CLI::ExistingFile);
    run->add_option("--schemes", schemes, "Comma list of stripe_nlmmse, mr_l2, lmmse_l4, or 'all'");
    run->add_option("--sweep", sweep, "none | K=5,10,15,20 | correlation_model=gaussian_local_scattering,uncorrelated");
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");
    run->add_option("--out", out_dir, "Output directory");

    std::string fh_config;
    bool fh_json = false;
    auto* fronthaul = app.add_subcommand("fronthaul", "Print front-haul scalar counts for L4 and the stripe");
    fronthaul->add_option("--config", fh_config, "Config file")->check(CLI::ExistingFile);
    fronthaul->add_flag("--json", fh_json, "Emit JSON instead of text");

    bool inject_fault = false;
    auto* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");
    selftest->add_flag("--inject-fault", inject_fault, "Perturb the error covariances; checks must fail");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, schemes, sweep, seed, workers, out_dir);
        if (fronthaul->parsed()) return cmd_fronthaul(fh_config, fh_json);
        if (selftest->parsed()) return cmd_selftest(inject_fault);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
