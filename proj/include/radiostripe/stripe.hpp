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

// Sequential uplink processing along the stripe, AP 1 -> AP L -> CPU.
//
// AP 1 combines its own N antennas. Every later AP l sees, for each served UE
// k, an augmented (N+1)-dimensional observation: its local antennas stacked
// with the soft estimate of s_k received from AP l-1. The previous stage's
// effective scalar channels g_{i_k(l-1)} act as the (N+1)-th channel entry,
// known only through the forwarded estimate ghat and error variance psi:
//
//   chat_{i_k l} = [hhat_il ; ghat_{i_k(l-1)}]
//   E{c c^H | side info} = chat chat^H + bldiag(Rtilde_il, psi_{i_k(l-1)})
//
// Each AP picks the normalized LMMSE combiner for that conditional model and
// forwards {shat_kl, ghat_{i_k l}, psi_{i_k l}} to the next hop. Unit-norm
// combiners keep the propagated noise variance at sigma2 throughout.
//
// Stage index l is zero-based in code: stage 0 is the first AP.

#include "radiostripe/channel.hpp"
#include "radiostripe/types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace rstripe {

// What one AP forwards to the next, for every served UE k and every UE i.
// true_channel and effective_noise are genie quantities kept for validation;
// they are not part of the front-haul payload.
template <typename Real>
struct StageState {
    CVec<Real> soft_estimate;     // shat_k; empty when no payload is simulated
    CMat<Real> channel_estimate;  // (i, k) -> ghat_{i_k}
    RMat<Real> error_variance;    // (i, k) -> psi_{i_k}

    CMat<Real> true_channel;      // (i, k) -> g_{i_k}; empty unless tracked
    CVec<Real> effective_noise;   // n_k; empty unless tracked

    int num_ues() const { return static_cast<int>(channel_estimate.cols()); }

    // K soft estimates + K^2 channel estimates + K^2 error variances.
    std::size_t num_entries() const {
        const auto K = static_cast<std::size_t>(num_ues());
        return K + 2 * K * K;
    }
};

// Conditional moments of the augmented channels seen by AP l while serving UE
// k, given the local estimates and the forwarded side information.
template <typename Real>
struct AugmentedSideInfo {
    const ChannelEstimateSet<Real>* estimates = nullptr;
    int ap = 0;
    int served_ue = 0;
    CMat<Real> estimate;              // (N+1) x K, column i = chat_{i_k l}
    RVec<Real> prior_error_variance;  // psi_{i_k(l-1)} for every i

    Eigen::Index dim() const { return estimate.rows(); }

    // E{c_i | side info}: the augmented estimate itself.
    auto conditional_mean(int i) const { return estimate.col(i); }

    // bldiag(Rtilde_il, psi_{i_k(l-1)}); the coupling blocks are exactly zero.
    CMat<Real> error_covariance(int i) const {
        const Eigen::Index n = dim() - 1;
        CMat<Real> e = CMat<Real>::Zero(dim(), dim());
        e.topLeftCorner(n, n) = estimates->rtilde(i, ap);
        e(n, n) = prior_error_variance(i);
        return e;
    }

    CMat<Real> second_moment(int i) const {
        return estimate.col(i) * estimate.col(i).adjoint() + error_covariance(i);
    }
};

namespace detail {

// Normalized solution of B x = b for Hermitian positive definite B. A zero
// right-hand side yields the fallback basis vector.
template <typename Real>
CVec<Real> normalized_solve(const Eigen::LLT<CMat<Real>>& chol, const CVec<Real>& b, Eigen::Index fallback) {
    CVec<Real> x = chol.solve(b);
    const Real norm = x.norm();
    if (!(norm > Real(0))) {
        x.setZero();
        x(fallback) = Real(1);
        return x;
    }
    return x / norm;
}

template <typename Real>
Eigen::LLT<CMat<Real>> factor_pd(const CMat<Real>& B) {
    Eigen::LLT<CMat<Real>> chol(B);
    if (chol.info() != Eigen::Success) throw std::runtime_error("combiner: matrix is not positive definite");
    return chol;
}

}  // namespace detail

// Local N-LMMSE combiners at one AP using only its own estimates:
//   v_k = normalize((sum_i p_i (hhat_i hhat_i^H + Rtilde_i) + sigma2 I)^{-1} hhat_k).
// Returns an N x K matrix, column k serving UE k.
template <typename Real>
CMat<Real> local_nlmmse_combiners(const ChannelEstimateSet<Real>& est, int ap, ConstSpan<Real> powers,
                                  Real sigma2) {
    const int K = est.num_ues();
    const int N = est.antennas();
    CMat<Real> B = CMat<Real>::Identity(N, N) * sigma2;
    CMat<Real> H(N, K);
    for (int i = 0; i < K; ++i) {
        H.col(i) = est.hhat(i, ap);
        B += powers[i] * (est.hhat(i, ap) * est.hhat(i, ap).adjoint() + est.rtilde(i, ap));
    }
    const auto chol = detail::factor_pd(hermitian_part(B));
    CMat<Real> V(N, K);
    for (int k = 0; k < K; ++k) V.col(k) = detail::normalized_solve<Real>(chol, H.col(k), 0);
    return V;
}

template <typename Real>
CMat<Real> combiner_first_ap(const ChannelEstimateSet<Real>& est, ConstSpan<Real> powers, Real sigma2) {
    return local_nlmmse_combiners(est, 0, powers, sigma2);
}

template <typename Real>
AugmentedSideInfo<Real> build_augmented_moments(const ChannelEstimateSet<Real>& est, int ap, int served_ue,
                                                const StageState<Real>& previous) {
    if (ap < 1) throw std::invalid_argument("build_augmented_moments: the first AP has no side information");
    const int K = est.num_ues();
    const int N = est.antennas();
    AugmentedSideInfo<Real> info;
    info.estimates = &est;
    info.ap = ap;
    info.served_ue = served_ue;
    info.estimate.resize(N + 1, K);
    for (int i = 0; i < K; ++i) {
        info.estimate.col(i).head(N) = est.hhat(i, ap);
        info.estimate(N, i) = previous.channel_estimate(i, served_ue);
    }
    info.prior_error_variance = previous.error_variance.col(served_ue);
    return info;
}

// v_kl = normalize((sum_i p_i E{c_i c_i^H | .} + sigma2 I)^{-1} chat_k).
// The sum is assembled in block form: Chat diag(p) Chat^H plus the
// block-diagonal error terms.
template <typename Real>
CVec<Real> combiner_stage(const AugmentedSideInfo<Real>& info, ConstSpan<Real> powers, Real sigma2) {
    const int K = static_cast<int>(info.estimate.cols());
    const Eigen::Index n = info.dim() - 1;
    RVec<Real> p(K);
    for (int i = 0; i < K; ++i) p(i) = powers[i];

    CMat<Real> B = info.estimate * p.asDiagonal() * info.estimate.adjoint();
    Real prior_error = 0;
    for (int i = 0; i < K; ++i) {
        B.topLeftCorner(n, n) += p(i) * info.estimates->rtilde(i, info.ap);
        prior_error += p(i) * info.prior_error_variance(i);
    }
    B(n, n) += prior_error;
    B.diagonal().array() += sigma2;

    const auto chol = detail::factor_pd(hermitian_part(B));
    return detail::normalized_solve<Real>(chol, info.estimate.col(info.served_ue), n);
}

// Applies stage-l combiners (one column per served UE) to the local data and
// the forwarded state. `previous` is null at the first AP. Payload and
// channels are optional; when given, soft estimates and the genie effective
// channels/noise are propagated as well.
template <typename Real>
StageState<Real> stage_update(const ChannelEstimateSet<Real>& est, int ap, const CMat<Real>& combiners,
                              const StageState<Real>* previous,
                              const PayloadObservation<Real>* payload = nullptr,
                              const ChannelRealization<Real>* channels = nullptr) {
    const int K = est.num_ues();
    const int N = est.antennas();
    const bool first = previous == nullptr;
    if (combiners.rows() != (first ? N : N + 1) || combiners.cols() != K) {
        throw std::invalid_argument("stage_update: combiner matrix has the wrong shape");
    }
    const bool with_payload = payload != nullptr && (first || previous->soft_estimate.size() == K);
    const bool with_genie = with_payload && channels != nullptr && (first || previous->true_channel.size() != 0);

    StageState<Real> s;
    s.channel_estimate.resize(K, K);
    s.error_variance.resize(K, K);
    if (with_payload) s.soft_estimate.resize(K);
    if (with_genie) {
        s.true_channel.resize(K, K);
        s.effective_noise.resize(K);
    }

    for (int k = 0; k < K; ++k) {
        const auto v_local = combiners.col(k).head(N);
        const Complex<Real> w_prev = first ? Complex<Real>(0) : std::conj(combiners(N, k));
        const Real w_prev_sq = std::norm(w_prev);

        for (int i = 0; i < K; ++i) {
            Complex<Real> ghat = v_local.dot(est.hhat(i, ap));
            Real psi = std::real(v_local.dot(est.rtilde(i, ap) * v_local));
            if (!first) {
                ghat += w_prev * previous->channel_estimate(i, k);
                psi += w_prev_sq * previous->error_variance(i, k);
            }
            s.channel_estimate(i, k) = ghat;
            s.error_variance(i, k) = std::max(psi, Real(0));

            if (with_genie) {
                Complex<Real> g = v_local.dot((*channels)(i, ap));
                if (!first) g += w_prev * previous->true_channel(i, k);
                s.true_channel(i, k) = g;
            }
        }
        if (with_payload) {
            Complex<Real> shat = v_local.dot(payload->received[ap]);
            if (!first) shat += w_prev * previous->soft_estimate(k);
            s.soft_estimate(k) = shat;
        }
        if (with_genie) {
            Complex<Real> noise = v_local.dot(payload->noise[ap]);
            if (!first) noise += w_prev * previous->effective_noise(k);
            s.effective_noise(k) = noise;
        }
    }
    return s;
}

template <typename Real>
struct StripeTrace {
    std::vector<CMat<Real>> combiners;  // per stage: N x K at stage 0, (N+1) x K afterwards
    std::vector<StageState<Real>> stages;
};

// Runs every stage in stripe order and returns what the last AP hands to the
// CPU: {shat_kL, ghat_{i_k L}, psi_{i_k L}}.
template <typename Real>
StageState<Real> run_stripe(const ChannelEstimateSet<Real>& est, ConstSpan<Real> powers, Real sigma2,
                            const PayloadObservation<Real>* payload = nullptr,
                            const ChannelRealization<Real>* channels = nullptr,
                            StripeTrace<Real>* trace = nullptr) {
    const int K = est.num_ues();
    const int N = est.antennas();
    const int L = est.num_aps();
    if (static_cast<int>(powers.size()) != K) throw std::invalid_argument("run_stripe: need one power per UE");

    CMat<Real> V = combiner_first_ap(est, powers, sigma2);
    StageState<Real> state = stage_update<Real>(est, 0, V, nullptr, payload, channels);
    if (trace) {
        trace->combiners.assign(1, V);
        trace->stages.assign(1, state);
    }
    for (int l = 1; l < L; ++l) {
        CMat<Real> Vl(N + 1, K);
        for (int k = 0; k < K; ++k) {
            Vl.col(k) = combiner_stage(build_augmented_moments(est, l, k, state), powers, sigma2);
        }
        state = stage_update<Real>(est, l, Vl, &state, payload, channels);
        if (trace) {
            trace->combiners.push_back(Vl);
            trace->stages.push_back(state);
        }
    }
    return state;
}

}  // namespace rstripe
