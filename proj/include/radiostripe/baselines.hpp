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

// Reference receivers on the same estimates as the stripe.
//
// Centralized LMMSE: the CPU sees all L*N antennas and applies the
// conditional MMSE combiner of the stacked model, whose estimation errors are
// independent across APs (block-diagonal covariance).
//
// Local MR: AP l computes hhat_kl^H y_l; the CPU averages the L local
// estimates with weight 1/L. Its SE is the use-and-then-forget bound, so the
// CPU only needs channel statistics. The expectations in the bound are
// estimated by sample means over the realizations of one drop.

#include "radiostripe/channel.hpp"
#include "radiostripe/metrics.hpp"
#include "radiostripe/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rstripe {

template <typename Real>
struct StackedChannel {
    CVec<Real> estimate;                   // [hhat_k1; ...; hhat_kL]
    std::vector<const CMat<Real>*> error;  // Rtilde_kl per AP

    Eigen::Index dim() const { return estimate.size(); }

    CMat<Real> error_covariance() const {
        CMat<Real> e = CMat<Real>::Zero(dim(), dim());
        Eigen::Index offset = 0;
        for (const CMat<Real>* block : error) {
            e.block(offset, offset, block->rows(), block->cols()) = *block;
            offset += block->rows();
        }
        return e;
    }

    // w^H bldiag(Rtilde_k1, ..., Rtilde_kL) w without forming the matrix.
    Real error_quadratic_form(const CVec<Real>& w) const {
        Real acc = 0;
        Eigen::Index offset = 0;
        for (const CMat<Real>* block : error) {
            const auto seg = w.segment(offset, block->rows());
            acc += std::real(seg.dot(*block * seg));
            offset += block->rows();
        }
        return acc;
    }
};

template <typename Real>
StackedChannel<Real> stack_estimates(const ChannelEstimateSet<Real>& est, int k) {
    const int L = est.num_aps();
    const int N = est.antennas();
    StackedChannel<Real> s;
    s.estimate.resize(static_cast<Eigen::Index>(L) * N);
    s.error.reserve(L);
    for (int l = 0; l < L; ++l) {
        s.estimate.segment(static_cast<Eigen::Index>(l) * N, N) = est.hhat(k, l);
        s.error.push_back(&est.rtilde(k, l));
    }
    return s;
}

// Conditional SINR of an arbitrary stacked combiner w for UE k:
//   p_k |w^H hhat_k|^2 / (sum_{i!=k} p_i |w^H hhat_i|^2 + sum_i p_i w^H E_i w + sigma2 ||w||^2)
template <typename Real>
Real stacked_conditional_sinr(const std::vector<StackedChannel<Real>>& stacked, const CVec<Real>& w, int k,
                              ConstSpan<Real> powers, Real sigma2) {
    Real denom = sigma2 * w.squaredNorm();
    for (std::size_t i = 0; i < stacked.size(); ++i) {
        denom += powers[i] * stacked[i].error_quadratic_form(w);
        if (static_cast<int>(i) != k) denom += powers[i] * std::norm(w.dot(stacked[i].estimate));
    }
    return powers[k] * std::norm(w.dot(stacked[k].estimate)) / denom;
}

// Centralized LMMSE SINR per UE. The combiner for UE k is
//   (sum_i p_i (hhat_i hhat_i^H + bldiag(Rtilde_i.)) + sigma2 I_LN)^{-1} hhat_k.
// Optionally returns the (unnormalized) combiners as columns.
template <typename Real>
RVec<Real> centralized_lmmse_l4(const ChannelEstimateSet<Real>& est, ConstSpan<Real> powers, Real sigma2,
                                CMat<Real>* combiners = nullptr) {
    const int K = est.num_ues();
    const int L = est.num_aps();
    const int N = est.antennas();
    const Eigen::Index dim = static_cast<Eigen::Index>(L) * N;

    std::vector<StackedChannel<Real>> stacked;
    stacked.reserve(K);
    CMat<Real> H(dim, K);
    for (int i = 0; i < K; ++i) {
        stacked.push_back(stack_estimates(est, i));
        H.col(i) = stacked.back().estimate;
    }

    RVec<Real> p(K);
    for (int i = 0; i < K; ++i) p(i) = powers[i];
    CMat<Real> B = H * p.asDiagonal() * H.adjoint();
    for (int l = 0; l < L; ++l) {
        const Eigen::Index off = static_cast<Eigen::Index>(l) * N;
        for (int i = 0; i < K; ++i) B.block(off, off, N, N) += p(i) * est.rtilde(i, l);
    }
    B.diagonal().array() += sigma2;
    Eigen::LLT<CMat<Real>> chol(hermitian_part(B));
    if (chol.info() != Eigen::Success) throw std::runtime_error("centralized_lmmse_l4: matrix is not positive definite");

    const CMat<Real> V = chol.solve(H);
    RVec<Real> sinr(K);
    for (int k = 0; k < K; ++k) {
        const CVec<Real> w = V.col(k);
        sinr(k) = w.squaredNorm() > Real(0) ? stacked_conditional_sinr(stacked, w, k, powers, sigma2) : Real(0);
    }
    if (combiners) *combiners = V;
    return sinr;
}

// Running sums for the use-and-then-forget bound of local MR with equal-weight
// fusion. Merge order does not change the result beyond roundoff; the
// experiment runner merges in block order for bitwise reproducibility.
template <typename Real>
struct MrStatistics {
    CVec<Real> signal;            // sum of w_k^H h_k
    RMat<Real> gain;              // (i, k): sum of |w_k^H h_i|^2
    RVec<Real> combiner_norm;     // sum of ||w_k||^2
    std::int64_t count = 0;

    explicit MrStatistics(int num_ues = 0)
        : signal(CVec<Real>::Zero(num_ues)),
          gain(RMat<Real>::Zero(num_ues, num_ues)),
          combiner_norm(RVec<Real>::Zero(num_ues)) {}

    void merge(const MrStatistics& other) {
        signal += other.signal;
        gain += other.gain;
        combiner_norm += other.combiner_norm;
        count += other.count;
    }
};

// Adds one realization: w_k = (1/L) [hhat_k1; ...; hhat_kL].
template <typename Real>
void mr_l2_accumulate(MrStatistics<Real>& stats, const ChannelEstimateSet<Real>& est,
                      const ChannelRealization<Real>& h) {
    const int K = est.num_ues();
    const int L = est.num_aps();
    const Real weight = Real(1) / static_cast<Real>(L);
    for (int k = 0; k < K; ++k) {
        Real norm_sq = 0;
        for (int l = 0; l < L; ++l) norm_sq += est.hhat(k, l).squaredNorm();
        stats.combiner_norm(k) += weight * weight * norm_sq;
        for (int i = 0; i < K; ++i) {
            Complex<Real> g(0);
            for (int l = 0; l < L; ++l) g += est.hhat(k, l).dot(h(i, l));
            g *= weight;
            stats.gain(i, k) += std::norm(g);
            if (i == k) stats.signal(k) += g;
        }
    }
    stats.count += 1;
}

// UatF SINR: p_k |E{w^H h_k}|^2 / (sum_i p_i E{|w^H h_i|^2} - p_k |E{w^H h_k}|^2 + sigma2 E{||w||^2}).
template <typename Real>
RVec<Real> mr_l2_sinr(const MrStatistics<Real>& stats, ConstSpan<Real> powers, Real sigma2) {
    if (stats.count == 0) throw std::invalid_argument("mr_l2_sinr: no realizations accumulated");
    const int K = static_cast<int>(stats.signal.size());
    const Real n = static_cast<Real>(stats.count);
    RVec<Real> sinr(K);
    for (int k = 0; k < K; ++k) {
        const Real signal = powers[k] * std::norm(stats.signal(k) / n);
        Real denom = sigma2 * stats.combiner_norm(k) / n - signal;
        for (int i = 0; i < K; ++i) denom += powers[i] * stats.gain(i, k) / n;
        sinr(k) = denom > Real(0) ? signal / denom : Real(0);
    }
    return sinr;
}

template <typename Real>
RVec<Real> mr_l2_spectral_efficiency(const MrStatistics<Real>& stats, ConstSpan<Real> powers, Real sigma2,
                                     int coherence_block, int pilot_length) {
    RVec<Real> se = mr_l2_sinr(stats, powers, sigma2);
    const Real pre = static_cast<Real>(prelog(coherence_block, pilot_length));
    for (Eigen::Index k = 0; k < se.size(); ++k) se(k) = pre * std::log2(Real(1) + se(k));
    return se;
}

}  // namespace rstripe
