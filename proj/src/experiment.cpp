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

#include "radiostripe/experiment.hpp"

#include "radiostripe/baselines.hpp"
#include "radiostripe/channel.hpp"
#include "radiostripe/scenario.hpp"
#include "radiostripe/stripe.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace rstripe {

namespace {

// Stream tags; setup geometry and per-block draws never share a stream.
constexpr std::uint64_t kSetupStream = 0;
constexpr std::uint64_t kBlockStream = 1;

struct SetupContext {
    std::vector<double> powers;
    std::optional<ChannelSampler<double>> sampler;
    std::shared_ptr<const EstimationStatistics<double>> stats;
    std::optional<Scenario<double>> scenario;
};

struct BlockResult {
    RVec<double> stripe_sinr;
    RVec<double> l4_sinr;
    std::optional<MrStatistics<double>> mr;
};

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs task(i) for i in [0, count) on a pool of workers. The first exception
// is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n == 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (int t = 0; t < n; ++t) pool.emplace_back(body);
    }
    if (error) std::rethrow_exception(error);
}

bool wants(const std::vector<Scheme>& schemes, Scheme s) {
    return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

const SchemeSamples& ExperimentResult::samples(Scheme s) const {
    for (const auto& entry : schemes) {
        if (entry.scheme == s) return entry;
    }
    throw std::out_of_range("scheme '" + to_string(s) + "' was not simulated");
}

ExperimentResult run_experiment(const SimulationConfig& config, const std::vector<Scheme>& schemes) {
    config.validate();
    if (schemes.empty()) throw std::invalid_argument("run_experiment: no schemes selected");

    const int S = config.num_setups;
    const int B = config.num_channel_realizations_per_setup;
    const int K = config.num_ues;
    const int workers = resolve_workers(config.workers);
    const double sigma2 = config.noise_power_w;
    const bool do_stripe = wants(schemes, Scheme::StripeNlmmse);
    const bool do_l4 = wants(schemes, Scheme::LmmseL4);
    const bool do_mr = wants(schemes, Scheme::MrL2);

    std::vector<SetupContext> setups(S);
    parallel_for(S, workers, [&](std::size_t s) {
        Rng rng = make_stream(config.rng_seed, {kSetupStream, s});
        SetupContext& ctx = setups[s];
        ctx.powers = config.powers();
        ctx.scenario = build_scenario<double>(config, rng);
        ctx.sampler = make_channel_sampler(*ctx.scenario);
        ctx.stats = std::make_shared<const EstimationStatistics<double>>(
            estimation_statistics<double>(*ctx.scenario, ctx.powers, sigma2));
    });

    std::vector<BlockResult> blocks(static_cast<std::size_t>(S) * B);
    parallel_for(blocks.size(), workers, [&](std::size_t item) {
        const std::size_t s = item / B;
        const std::size_t b = item % B;
        const SetupContext& ctx = setups[s];
        Rng rng = make_stream(config.rng_seed, {kBlockStream, s, b});
        const auto h = draw_channels(*ctx.sampler, rng);
        const auto obs = simulate_pilot_phase<double>(*ctx.scenario, ctx.powers, sigma2, h, rng);
        const auto est = mmse_estimate<double>(ctx.stats, obs);

        BlockResult& r = blocks[item];
        if (do_stripe) r.stripe_sinr = stripe_sinr(run_stripe<double>(est, ctx.powers, sigma2), ctx.powers, sigma2);
        if (do_l4) r.l4_sinr = centralized_lmmse_l4<double>(est, ctx.powers, sigma2);
        if (do_mr) {
            r.mr.emplace(K);
            mr_l2_accumulate(*r.mr, est, h);
        }
    });

    ExperimentResult result;
    result.config = config;
    const double pre = config.prelog();
    for (Scheme scheme : schemes) {
        SchemeSamples out{scheme, std::vector<double>(static_cast<std::size_t>(S) * K)};
        for (int s = 0; s < S; ++s) {
            const auto base = static_cast<std::size_t>(s) * B;
            if (scheme == Scheme::MrL2) {
                MrStatistics<double> acc(K);
                for (int b = 0; b < B; ++b) acc.merge(*blocks[base + b].mr);
                const RVec<double> se = mr_l2_spectral_efficiency<double>(
                    acc, setups[s].powers, sigma2, config.coherence_block, config.pilot_length);
                for (int k = 0; k < K; ++k) out.se[static_cast<std::size_t>(s) * K + k] = se(k);
                continue;
            }
            for (int k = 0; k < K; ++k) {
                double acc = 0.0;
                for (int b = 0; b < B; ++b) {
                    const BlockResult& r = blocks[base + b];
                    const double sinr = scheme == Scheme::StripeNlmmse ? r.stripe_sinr(k) : r.l4_sinr(k);
                    acc += std::log2(1.0 + sinr);
                }
                out.se[static_cast<std::size_t>(s) * K + k] = pre * acc / B;
            }
        }
        result.schemes.push_back(std::move(out));
    }
    return result;
}

std::vector<SweepPoint> expand_sweep(const SimulationConfig& base, const std::string& sweep) {
    const std::string spec = trim(sweep);
    if (spec.empty() || spec == "none") return {SweepPoint{"", base}};
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep must look like 'K=5,10' or 'correlation_model=...'");
    std::string field = trim(spec.substr(0, eq));
    std::transform(field.begin(), field.end(), field.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto values = split(spec.substr(eq + 1), ',');

    std::vector<SweepPoint> points;
    for (const auto& v : values) {
        SweepPoint p{"", base};
        if (field == "k" || field == "num_ues") {
            int k = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
            if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("bad K sweep value '" + v + "'");
            p.config.num_ues = k;
            p.label = "K=" + std::to_string(k);
        } else if (field == "correlation_model") {
            p.config.correlation_model = parse_correlation_model(v);
            p.label = "correlation_model=" + to_string(p.config.correlation_model);
        } else {
            throw ConfigError("unsupported sweep variable '" + field + "'");
        }
        p.config.validate();
        points.push_back(std::move(p));
    }
    if (points.empty()) throw ConfigError("sweep has no values");
    return points;
}

std::vector<Scheme> parse_scheme_list(const std::string& csv) {
    const std::string t = trim(csv);
    if (t.empty() || t == "all") return all_schemes();
    std::vector<Scheme> out;
    for (const auto& name : split(t, ',')) {
        const Scheme s = parse_scheme(name);
        if (!wants(out, s)) out.push_back(s);
    }
    return out;
}

void write_se_csv(std::ostream& out, const ExperimentResult& result) {
    const int K = result.config.num_ues;
    out << "scheme,setup,ue,se_bits_per_hz\n";
    for (const auto& entry : result.schemes) {
        for (std::size_t idx = 0; idx < entry.se.size(); ++idx) {
            out << to_string(entry.scheme) << ',' << idx / K << ',' << idx % K << ','
                << format_double(entry.se[idx]) << '\n';
        }
    }
}

void write_cdf_csv(std::ostream& out, const SchemeSamples& samples) {
    const CdfSeries cdf = empirical_cdf(samples.se);
    out << "se_bits_per_hz,cdf\n";
    for (std::size_t i = 0; i < cdf.values.size(); ++i) {
        out << format_double(cdf.values[i]) << ',' << format_double(cdf.probabilities[i]) << '\n';
    }
}

nlohmann::json fronthaul_json(const SimulationConfig& c) {
    const auto l4 = fronthaul_load(Scheme::LmmseL4, c.antennas_per_ap, c.num_aps, c.num_ues, c.coherence_block,
                                   c.pilot_length);
    const auto stripe = fronthaul_load(Scheme::StripeNlmmse, c.antennas_per_ap, c.num_aps, c.num_ues,
                                       c.coherence_block, c.pilot_length);
    return {{"l4", l4.real_scalars_to_cpu_per_block},
            {"stripe", stripe.real_scalars_per_block_per_segment},
            {"reduction", stripe.reduction_vs_l4}};
}

nlohmann::json summary_json(const ExperimentResult& result) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(config_fingerprint(result.config)));
    j["scenario_fingerprint"] = hex;
    if (!result.label.empty()) j["sweep_point"] = result.label;
    for (const auto& entry : result.schemes) {
        j[to_string(entry.scheme)] = {{"median_se", percentile(entry.se, 0.5)},
                                      {"p05_se", percentile(entry.se, 0.05)},
                                      {"n_samples", entry.se.size()}};
    }
    j["fronthaul"] = fronthaul_json(result.config);
    return j;
}

void write_outputs(const std::filesystem::path& dir, const ExperimentResult& result) {
    std::filesystem::create_directories(dir);
    auto open = [&dir](const std::string& name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        return f;
    };
    {
        auto f = open("se.csv");
        write_se_csv(f, result);
    }
    for (const auto& entry : result.schemes) {
        auto f = open("cdf_" + to_string(entry.scheme) + ".csv");
        write_cdf_csv(f, entry);
    }
    {
        auto f = open("summary.json");
        f << summary_json(result).dump(2) << '\n';
    }
    {
        auto f = open("resolved_config.ini");
        f << format_config(result.config);
    }
}

}  // namespace rstripe
