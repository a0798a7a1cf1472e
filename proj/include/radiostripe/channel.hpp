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

// Correlated Rayleigh fading, the despread pilot phase and per-AP MMSE
// channel estimation.
//
// Everything that depends only on the drop (covariance factors, the pilot
// covariances Psi, estimation filters and the estimate/error covariances) is
// computed once in EstimationStatistics and shared by all coherence blocks of
// that drop. Per block only the channel draw, the despread pilot signal and
// one matrix-vector product per (UE, AP) remain.

#include "radiostripe/scenario.hpp"
#include "radiostripe/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace rstripe {

template <typename Real>
using ChannelRealization = UeApTable<CVec<Real>>;

// Any A with A A^H = R, from the eigendecomposition. Eigenvalues that are
// negative only through roundoff are treated as zero.
template <typename Real>
CMat<Real> psd_factor(const CMat<Real>& R) {
    const Eigen::Index n = R.rows();
    if (n == 0) return R;
    Eigen::SelfAdjointEigenSolver<CMat<Real>> eig(hermitian_part(R));
    if (eig.info() != Eigen::Success) throw std::runtime_error("psd_factor: eigen decomposition failed");
    const Real scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), Real(0));
    const Real tol = std::max(Real(1e-10), Real(100) * Real(n) * std::numeric_limits<Real>::epsilon());
    if (eig.eigenvalues().minCoeff() < -tol * scale) {
        throw std::runtime_error("psd_factor: covariance is not positive semidefinite");
    }
    const RVec<Real> root = eig.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

template <typename Real>
struct ChannelSampler {
    UeApTable<CMat<Real>> factor;
};

template <typename Real>
ChannelSampler<Real> make_channel_sampler(const Scenario<Real>& sc) {
    ChannelSampler<Real> s{UeApTable<CMat<Real>>(sc.num_ues, sc.num_aps)};
    for (int k = 0; k < sc.num_ues; ++k) {
        for (int l = 0; l < sc.num_aps; ++l) s.factor(k, l) = psd_factor(sc.R(k, l));
    }
    return s;
}

// h_kl ~ CN(0, R_kl), independent over (k, l).
template <typename Real>
ChannelRealization<Real> draw_channels(const ChannelSampler<Real>& sampler, Rng& rng) {
    const int K = sampler.factor.num_ues();
    const int L = sampler.factor.num_aps();
    ChannelRealization<Real> h(K, L);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            const CMat<Real>& A = sampler.factor(k, l);
            h(k, l) = A * standard_complex_normal<Real>(A.cols(), rng);
        }
    }
    return h;
}

template <typename Real>
ChannelRealization<Real> draw_channels(const Scenario<Real>& sc, Rng& rng) {
    return draw_channels(make_channel_sampler(sc), rng);
}

// Despread pilot signals z_{t,l}, one per (pilot, AP). Rows of the table are
// pilot indices.
template <typename Real>
struct PilotObservation {
    UeApTable<CVec<Real>> despread;

    const CVec<Real>& z(int pilot, int l) const { return despread(pilot, l); }
};

// z_{t,l} = sum_{i : t_i = t} sqrt(p_i tau_p) h_il + n_{t,l}, n ~ CN(0, sigma2 I).
template <typename Real>
PilotObservation<Real> simulate_pilot_phase(const Scenario<Real>& sc, ConstSpan<Real> powers,
                                            Real sigma2, const ChannelRealization<Real>& h,
                                            Rng& rng) {
    const int L = sc.num_aps;
    const int N = sc.antennas;
    const Real tau_p = static_cast<Real>(sc.pilot_length);
    const Real noise_std = std::sqrt(sigma2);
    PilotObservation<Real> obs{UeApTable<CVec<Real>>(sc.pilot_length, L)};
    for (int t = 0; t < sc.pilot_length; ++t) {
        for (int l = 0; l < L; ++l) {
            obs.despread(t, l) = standard_complex_normal<Real>(N, rng) * noise_std;
        }
    }
    for (int i = 0; i < sc.num_ues; ++i) {
        const int t = sc.pilots.pilot_index[i];
        const Real amp = std::sqrt(powers[i] * tau_p);
        for (int l = 0; l < L; ++l) obs.despread(t, l) += amp * h(i, l);
    }
    return obs;
}

template <typename Real>
struct EstimationStatistics {
    int num_ues = 0;
    int num_aps = 0;
    int antennas = 0;
    std::vector<int> pilot_index;

    UeApTable<CMat<Real>> psi;     // (pilot, AP): sum_{i in S} tau_p p_i R_il + sigma2 I
    UeApTable<CMat<Real>> filter;  // (UE, AP): sqrt(p_k tau_p) R_kl Psi^{-1}
    UeApTable<CMat<Real>> rhat;    // covariance of the estimate
    UeApTable<CMat<Real>> rtilde;  // covariance of the estimation error
};

// Drop-constant part of MMSE estimation. Psi^{-1} is applied through a
// Cholesky solve; no inverse is formed.
template <typename Real>
EstimationStatistics<Real> estimation_statistics(const Scenario<Real>& sc, ConstSpan<Real> powers,
                                                 Real sigma2) {
    const int K = sc.num_ues;
    const int L = sc.num_aps;
    const int N = sc.antennas;
    const Real tau_p = static_cast<Real>(sc.pilot_length);
    if (static_cast<int>(powers.size()) != K) {
        throw std::invalid_argument("estimation_statistics: need one power per UE");
    }

    EstimationStatistics<Real> st;
    st.num_ues = K;
    st.num_aps = L;
    st.antennas = N;
    st.pilot_index = sc.pilots.pilot_index;
    st.psi = UeApTable<CMat<Real>>(sc.pilot_length, L, CMat<Real>::Identity(N, N) * sigma2);
    st.filter = UeApTable<CMat<Real>>(K, L);
    st.rhat = UeApTable<CMat<Real>>(K, L);
    st.rtilde = UeApTable<CMat<Real>>(K, L);

    for (int i = 0; i < K; ++i) {
        const int t = sc.pilots.pilot_index[i];
        for (int l = 0; l < L; ++l) st.psi(t, l) += tau_p * powers[i] * sc.R(i, l);
    }

    for (int l = 0; l < L; ++l) {
        std::vector<Eigen::LLT<CMat<Real>>> chol(sc.pilot_length);
        std::vector<bool> used(sc.pilot_length, false);
        for (int k = 0; k < K; ++k) used[sc.pilots.pilot_index[k]] = true;
        for (int t = 0; t < sc.pilot_length; ++t) {
            if (!used[t]) continue;
            chol[t].compute(st.psi(t, l));
            const Real trace = st.psi(t, l).trace().real();
            if (chol[t].info() != Eigen::Success ||
                chol[t].matrixLLT().diagonal().real().cwiseAbs2().minCoeff() <= Real(1e-12) * trace) {
                throw std::runtime_error("estimation_statistics: pilot covariance is not positive definite");
            }
        }
        for (int k = 0; k < K; ++k) {
            const int t = sc.pilots.pilot_index[k];
            const CMat<Real>& R = sc.R(k, l);
            // Psi^{-1} R; its adjoint is R Psi^{-1} since both are Hermitian.
            const CMat<Real> psi_inv_r = chol[t].solve(R);
            const Real gain = std::sqrt(powers[k] * tau_p);
            st.filter(k, l) = gain * psi_inv_r.adjoint();
            st.rhat(k, l) = hermitian_part(powers[k] * tau_p * (R * psi_inv_r));
            st.rtilde(k, l) = hermitian_part(R - st.rhat(k, l));
        }
    }
    return st;
}

// Per-block channel estimates plus a handle to the drop statistics that
// describe them.
template <typename Real>
struct ChannelEstimateSet {
    std::shared_ptr<const EstimationStatistics<Real>> stats;
    UeApTable<CVec<Real>> estimate;

    int num_ues() const { return stats->num_ues; }
    int num_aps() const { return stats->num_aps; }
    int antennas() const { return stats->antennas; }
    const CVec<Real>& hhat(int k, int l) const { return estimate(k, l); }
    const CMat<Real>& rhat(int k, int l) const { return stats->rhat(k, l); }
    const CMat<Real>& rtilde(int k, int l) const { return stats->rtilde(k, l); }
};

// hhat_kl = sqrt(p_k tau_p) R_kl Psi^{-1} z_{t_k l}.
template <typename Real>
ChannelEstimateSet<Real> mmse_estimate(std::shared_ptr<const EstimationStatistics<Real>> stats,
                                       const PilotObservation<Real>& obs) {
    ChannelEstimateSet<Real> est{stats, UeApTable<CVec<Real>>(stats->num_ues, stats->num_aps)};
    for (int k = 0; k < stats->num_ues; ++k) {
        const int t = stats->pilot_index[k];
        for (int l = 0; l < stats->num_aps; ++l) {
            est.estimate(k, l) = stats->filter(k, l) * obs.z(t, l);
        }
    }
    return est;
}

template <typename Real>
ChannelEstimateSet<Real> mmse_estimate(const Scenario<Real>& sc, ConstSpan<Real> powers, Real sigma2,
                                       const PilotObservation<Real>& obs) {
    auto stats = std::make_shared<const EstimationStatistics<Real>>(estimation_statistics(sc, powers, sigma2));
    return mmse_estimate(std::move(stats), obs);
}

// Uplink payload of one channel use: y_l = sum_i h_il s_i + n_l with
// s_i ~ CN(0, p_i) and n_l ~ CN(0, sigma2 I).
template <typename Real>
struct PayloadObservation {
    CVec<Real> symbols;
    std::vector<CVec<Real>> noise;
    std::vector<CVec<Real>> received;
};

template <typename Real>
PayloadObservation<Real> draw_payload(const ChannelRealization<Real>& h, ConstSpan<Real> powers,
                                      Real sigma2, Rng& rng) {
    const int K = h.num_ues();
    const int L = h.num_aps();
    PayloadObservation<Real> y;
    y.symbols = standard_complex_normal<Real>(K, rng);
    for (int i = 0; i < K; ++i) y.symbols(i) *= std::sqrt(powers[i]);
    y.noise.reserve(L);
    y.received.reserve(L);
    for (int l = 0; l < L; ++l) {
        const Eigen::Index N = h(0, l).size();
        CVec<Real> n = standard_complex_normal<Real>(N, rng) * std::sqrt(sigma2);
        CVec<Real> r = n;
        for (int i = 0; i < K; ++i) r += h(i, l) * y.symbols(i);
        y.noise.push_back(std::move(n));
        y.received.push_back(std::move(r));
    }
    return y;
}

}  // namespace rstripe
