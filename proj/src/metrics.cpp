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

#include "radiostripe/metrics.hpp"

#include <algorithm>

namespace rstripe {

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::StripeNlmmse: return "stripe_nlmmse";
        case Scheme::MrL2: return "mr_l2";
        case Scheme::LmmseL4: return "lmmse_l4";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& text) {
    for (Scheme s : all_schemes()) {
        if (to_string(s) == text) return s;
    }
    throw std::invalid_argument("unknown scheme '" + text + "' (expected stripe_nlmmse, mr_l2 or lmmse_l4)");
}

std::vector<Scheme> all_schemes() { return {Scheme::StripeNlmmse, Scheme::MrL2, Scheme::LmmseL4}; }

FronthaulReport fronthaul_load(Scheme scheme, int antennas, int num_aps, int num_ues, int coherence_block,
                               int pilot_length) {
    if (antennas < 1 || num_aps < 1 || num_ues < 1 || coherence_block < 1 || pilot_length < 0 ||
        pilot_length > coherence_block) {
        throw std::invalid_argument("fronthaul_load: dimensions must be positive with tau_p <= tau_c");
    }
    const std::int64_t N = antennas;
    const std::int64_t L = num_aps;
    const std::int64_t K = num_ues;
    const std::int64_t tc = coherence_block;
    const std::int64_t tp = pilot_length;
    const std::int64_t l4 = 2 * N * L * tc;
    const std::int64_t stripe = 3 * K * K + 2 * K * (tc - tp);

    FronthaulReport r;
    r.scheme = scheme;
    switch (scheme) {
        case Scheme::LmmseL4:
            // Every AP forwards its raw samples; the CPU link carries all of them.
            r.real_scalars_per_block_per_segment = l4;
            r.real_scalars_to_cpu_per_block = l4;
            break;
        case Scheme::StripeNlmmse:
            r.real_scalars_per_block_per_segment = stripe;
            r.real_scalars_to_cpu_per_block = stripe;
            break;
        case Scheme::MrL2:
            throw std::invalid_argument("fronthaul_load: no front-haul model for mr_l2");
    }
    r.reduction_vs_l4 = 1.0 - static_cast<double>(r.real_scalars_to_cpu_per_block) / static_cast<double>(l4);
    return r;
}

CdfSeries empirical_cdf(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical_cdf: need at least one sample");
    CdfSeries cdf;
    cdf.values.assign(samples.begin(), samples.end());
    for (double v : cdf.values) {
        if (std::isnan(v)) throw std::invalid_argument("empirical_cdf: NaN sample");
    }
    std::stable_sort(cdf.values.begin(), cdf.values.end());
    const auto n = cdf.values.size();
    cdf.probabilities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cdf.probabilities[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return cdf;
}

double percentile(std::span<const double> samples, double q) {
    if (samples.empty()) throw std::invalid_argument("percentile: need at least one sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in [0, 1]");
    std::vector<double> sorted(samples.begin(), samples.end());
    for (double v : sorted) {
        if (std::isnan(v)) throw std::invalid_argument("percentile: NaN sample");
    }
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace rstripe
