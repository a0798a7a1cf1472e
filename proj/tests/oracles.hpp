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

// Test-only reference computations. Nothing here calls into the combiner,
// estimator or baseline code paths it is used to check.

#include "radiostripe/channel.hpp"
#include "radiostripe/scenario.hpp"
#include "radiostripe/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace rstripe::oracle {

using Cd = std::complex<double>;
using CMatd = CMat<double>;
using CVecd = CVec<double>;

// Random Hermitian PSD matrix with trace N * beta.
inline CMatd random_covariance(int n, double beta, Rng& rng, bool full_rank = true) {
    const int cols = full_rank ? n + 1 : 1;
    CMatd A(n, cols);
    for (int c = 0; c < cols; ++c) A.col(c) = standard_complex_normal<double>(n, rng);
    CMatd R = A * A.adjoint();
    R = (R + R.adjoint()) / 2.0;
    return R * (n * beta / R.trace().real());
}

// Small scenario with random covariances, bypassing geometry.
inline Scenario<double> random_scenario(int antennas, int num_ues, int num_aps, int pilot_length, Rng& rng) {
    std::uniform_real_distribution<double> beta_dist(0.5, 4.0);
    Scenario<double> sc;
    sc.num_aps = num_aps;
    sc.antennas = antennas;
    sc.num_ues = num_ues;
    sc.pilot_length = pilot_length;
    sc.distance = RMat<double>::Ones(num_ues, num_aps);
    sc.beta.resize(num_ues, num_aps);
    sc.angle = RMat<double>::Zero(num_ues, num_aps);
    sc.covariance = UeApTable<CMatd>(num_ues, num_aps);
    for (int k = 0; k < num_ues; ++k) {
        for (int l = 0; l < num_aps; ++l) {
            const double beta = beta_dist(rng);
            sc.beta(k, l) = beta;
            sc.covariance(k, l) = random_covariance(antennas, beta, rng);
        }
    }
    sc.pilots = assign_pilots(num_ues, pilot_length, rng);
    return sc;
}

inline std::vector<double> random_powers(int num_ues, Rng& rng) {
    std::uniform_real_distribution<double> d(0.5, 2.0);
    std::vector<double> p(num_ues);
    for (auto& x : p) x = d(rng);
    return p;
}

// sum_i p_i (chat_i chat_i^H + E_i) + sigma2 I, assembled term by term.
inline CMatd conditional_moment_sum(const std::vector<CVecd>& chat, const std::vector<CMatd>& error,
                                    const std::vector<double>& powers, double sigma2) {
    const auto d = chat.front().size();
    CMatd B = CMatd::Identity(d, d) * sigma2;
    for (std::size_t i = 0; i < chat.size(); ++i) {
        B += powers[i] * (chat[i] * chat[i].adjoint() + error[i]);
    }
    return B;
}

// Conditional MSE of the linear estimate v^H y of s_k:
//   E{|s_k - v^H y|^2} = p_k - 2 p_k Re(v^H b) + v^H B v.
inline double conditional_mse(const CVecd& v, const CMatd& B, const CVecd& b, double p_k) {
    return p_k - 2.0 * p_k * std::real(v.dot(b)) + std::real(v.dot(B * v));
}

// Unit vector in C^d (first entry real, non-negative) from d-1 magnitude
// angles in [0, pi/2] and d-1 phases.
inline CVecd direction_from_params(const std::vector<double>& x, int d) {
    CVecd u(d);
    double remaining = 1.0;
    for (int i = 0; i < d - 1; ++i) {
        const double a = x[i];
        const double mag = remaining * std::cos(a);
        const double phase = i == 0 ? 0.0 : x[d - 1 + i - 1];
        u(i) = std::polar(mag, phase);
        remaining *= std::sin(a);
    }
    u(d - 1) = std::polar(remaining, d > 1 ? x[2 * (d - 1) - 1] : 0.0);
    return u;
}

// Best MSE reachable along direction u when the gain is free:
//   min_alpha MSE(alpha u) = p_k - p_k^2 |u^H b|^2 / (u^H B u).
inline double direction_mse(const CVecd& u, const CMatd& B, const CVecd& b, double p_k) {
    const double quad = std::real(u.dot(B * u));
    const Cd alpha = p_k * u.dot(b) / quad;
    const CVecd v = alpha * u;
    return conditional_mse(v, B, b, p_k);
}

inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, int iterations) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

    for (int it = 0; it < iterations; ++it) {
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fx[best]) {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) { simplex[worst] = xe; fx[worst] = fe; }
            else { simplex[worst] = xr; fx[worst] = fr; }
        } else if (fr < fx[second]) {
            simplex[worst] = xr;
            fx[worst] = fr;
        } else {
            const auto xc = along(fr < fx[worst] ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fx[worst])) {
                simplex[worst] = xc;
                fx[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    }
                    fx[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (fx[i] < fx[best]) best = i;
    }
    return simplex[best];
}

// Brute-force minimizer of the conditional MSE over combining directions:
// dense grid over the (magnitude, phase) parameterization followed by
// repeated Nelder-Mead refinement. Returns a unit vector.
inline CVecd brute_force_direction(const CMatd& B, const CVecd& b, double p_k, int grid = 14) {
    const int d = static_cast<int>(b.size());
    if (d == 1) return CVecd::Ones(1);
    const int n = 2 * (d - 1);
    auto f = [&](const std::vector<double>& x) { return direction_mse(direction_from_params(x, d), B, b, p_k); };

    std::vector<double> best_x(n, 0.0);
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    const double pi = std::numbers::pi;
    for (;;) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) {
            const bool magnitude = i < d - 1;
            x[i] = magnitude ? (idx[i] + 0.5) * (pi / 2) / grid : idx[i] * (2 * pi) / (2 * grid);
        }
        const double fx = f(x);
        if (fx < best_f) { best_f = fx; best_x = x; }
        int pos = 0;
        while (pos < n && ++idx[pos] == (pos < d - 1 ? grid : 2 * grid)) idx[pos++] = 0;
        if (pos == n) break;
    }
    double step = pi / grid;
    for (int round = 0; round < 8; ++round) {
        best_x = nelder_mead(f, best_x, step, 600);
        step *= 0.1;
    }
    return direction_from_params(best_x, d);
}

// Angle between two complex directions, ignoring a common phase.
inline double direction_angle(const CVecd& a, const CVecd& b) {
    const double c = std::abs(a.normalized().dot(b.normalized()));
    return std::acos(std::min(1.0, c));
}

// Closed-form moments of fused MR w_k = (1/L) [hhat_k1; ...; hhat_kL] under
// MMSE estimation with pilot contamination:
//   E{w^H h_k}        = (1/L) sum_l tr(Rhat_kl)
//   E{|w^H h_i|^2}    = (1/L^2) [sum_l tr(R_il Rhat_kl) + [i in S_k] |sum_l sqrt(p_i p_k) tau_p tr(Psi_l^{-1} R_kl R_il)|^2]
//   E{||w||^2}        = (1/L^2) sum_l tr(Rhat_kl)
// Returns the UatF SINR per UE. Uses explicit inverses of Psi on purpose.
inline std::vector<double> mr_uatf_closed_form(const Scenario<double>& sc, const std::vector<double>& p,
                                               double sigma2) {
    const int K = sc.num_ues;
    const int L = sc.num_aps;
    const int N = sc.antennas;
    const double tau = sc.pilot_length;
    std::vector<CMatd> psi_inv(static_cast<std::size_t>(sc.pilot_length) * L);
    for (int t = 0; t < sc.pilot_length; ++t) {
        for (int l = 0; l < L; ++l) {
            CMatd psi = CMatd::Identity(N, N) * sigma2;
            for (int i = 0; i < K; ++i) {
                if (sc.pilots.pilot_index[i] == t) psi += tau * p[i] * sc.R(i, l);
            }
            psi_inv[t * L + l] = psi.inverse();
        }
    }
    auto rhat = [&](int k, int l) -> CMatd {
        return p[k] * tau * sc.R(k, l) * psi_inv[sc.pilots.pilot_index[k] * L + l] * sc.R(k, l);
    };
    std::vector<double> sinr(K);
    for (int k = 0; k < K; ++k) {
        double mean_signal = 0.0;
        double norm = 0.0;
        for (int l = 0; l < L; ++l) {
            const double tr = rhat(k, l).trace().real();
            mean_signal += tr / L;
            norm += tr / (double(L) * L);
        }
        double total = 0.0;
        for (int i = 0; i < K; ++i) {
            double second = 0.0;
            Cd coherent = 0.0;
            for (int l = 0; l < L; ++l) {
                second += (sc.R(i, l) * rhat(k, l)).trace().real();
                if (sc.pilots.pilot_index[i] == sc.pilots.pilot_index[k]) {
                    coherent += std::sqrt(p[i] * p[k]) * tau *
                                (psi_inv[sc.pilots.pilot_index[k] * L + l] * sc.R(k, l) * sc.R(i, l)).trace();
                }
            }
            total += p[i] * (second + std::norm(coherent)) / (double(L) * L);
        }
        const double signal = p[k] * mean_signal * mean_signal;
        sinr[k] = signal / (total - signal + sigma2 * norm);
    }
    return sinr;
}

}  // namespace rstripe::oracle
