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

#include "radiostripe/stripe.hpp"
#include "radiostripe/types.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstripe {

// Effective SINR of UE k at the CPU from the forwarded effective-channel
// estimates and error variances (one entry per interfering UE i):
//   p_k |ghat_kk|^2 / (sum_{i!=k} p_i |ghat_ik|^2 + sum_i p_i psi_ik + sigma2)
template <typename Real, typename ChannelVec, typename VarianceVec>
Real instantaneous_sinr(const ChannelVec& ghat, const VarianceVec& psi, int k, ConstSpan<Real> powers,
                        Real sigma2) {
    const auto K = static_cast<int>(powers.size());
    Real interference = sigma2;
    for (int i = 0; i < K; ++i) {
        interference += powers[i] * psi[i];
        if (i != k) interference += powers[i] * std::norm(ghat[i]);
    }
    return powers[k] * std::norm(ghat[k]) / interference;
}

// SINR of every UE from a stage state.
template <typename Real>
RVec<Real> stripe_sinr(const StageState<Real>& state, ConstSpan<Real> powers, Real sigma2) {
    const int K = state.num_ues();
    RVec<Real> sinr(K);
    for (int k = 0; k < K; ++k) {
        const CVec<Real> g = state.channel_estimate.col(k);
        const RVec<Real> psi = state.error_variance.col(k);
        sinr(k) = instantaneous_sinr<Real>(g, psi, k, powers, sigma2);
    }
    return sinr;
}

inline double prelog(int coherence_block, int pilot_length) {
    return 1.0 - static_cast<double>(pilot_length) / static_cast<double>(coherence_block);
}

// (1 - tau_p/tau_c) times the sample mean of log2(1 + SINR).
template <typename Real = double>
Real spectral_efficiency(ConstSpan<Real> sinr_samples, int coherence_block, int pilot_length) {
    if (sinr_samples.empty()) throw std::invalid_argument("spectral_efficiency: need at least one sample");
    Real acc = 0;
    for (Real s : sinr_samples) acc += std::log2(Real(1) + s);
    return static_cast<Real>(prelog(coherence_block, pilot_length)) * acc /
           static_cast<Real>(sinr_samples.size());
}

enum class Scheme { StripeNlmmse, MrL2, LmmseL4 };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);
std::vector<Scheme> all_schemes();

struct FronthaulReport {
    Scheme scheme = Scheme::StripeNlmmse;
    std::int64_t real_scalars_per_block_per_segment = 0;
    std::int64_t real_scalars_to_cpu_per_block = 0;
    double reduction_vs_l4 = 0.0;  // 1 - this scheme / L4, on the CPU link
};

// Real-valued scalars per coherence block. L4 ships 2 N L tau_c to the CPU;
// the stripe ships 3 K^2 + 2 K (tau_c - tau_p) over every segment, the CPU
// link included. Only those two schemes are modeled.
FronthaulReport fronthaul_load(Scheme scheme, int antennas, int num_aps, int num_ues, int coherence_block,
                               int pilot_length);

struct CdfSeries {
    std::vector<double> values;
    std::vector<double> probabilities;
};

// Stable-sorted samples with probabilities i/n. Rejects NaN.
CdfSeries empirical_cdf(std::span<const double> samples);

// Linear interpolation between order statistics at position (n - 1) q.
double percentile(std::span<const double> samples, double q);

}  // namespace rstripe
