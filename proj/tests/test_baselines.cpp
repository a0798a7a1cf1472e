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

#include "oracles.hpp"
#include "radiostripe/baselines.hpp"
#include "radiostripe/metrics.hpp"
#include "radiostripe/stripe.hpp"

#include <doctest.h>

#include <cmath>

using namespace rstripe;
using oracle::CMatd;
using oracle::CVecd;

namespace {

// Estimate set with no estimation error: hhat = h, Rtilde = 0.
ChannelEstimateSet<double> perfect_csi(const ChannelRealization<double>& h) {
    const int K = h.num_ues();
    const int L = h.num_aps();
    const int N = static_cast<int>(h(0, 0).size());
    auto st = std::make_shared<EstimationStatistics<double>>();
    st->num_ues = K;
    st->num_aps = L;
    st->antennas = N;
    st->pilot_index.resize(K);
    st->rhat = UeApTable<CMatd>(K, L);
    st->rtilde = UeApTable<CMatd>(K, L, CMatd::Zero(N, N));
    ChannelEstimateSet<double> est{st, h};
    return est;
}

}  // namespace

TEST_CASE("L4 with a single AP coincides with the stripe") {
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sc = oracle::random_scenario(3, 3, 1, 2, rng);
        const auto p = oracle::random_powers(3, rng);
        const auto h = draw_channels(sc, rng);
        const auto obs = simulate_pilot_phase<double>(sc, p, 0.2, h, rng);
        const auto est = mmse_estimate<double>(sc, p, 0.2, obs);
        const RVec<double> l4 = centralized_lmmse_l4<double>(est, p, 0.2);
        const RVec<double> rs = stripe_sinr<double>(run_stripe<double>(est, p, 0.2), p, 0.2);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(l4(k) / rs(k) - 1.0) < 1e-10);
    }
}

TEST_CASE("L4 dominates the stripe per realization") {
    Rng rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const int K = 1 + trial % 5;
        const auto sc = oracle::random_scenario(1 + trial % 3, K, 2 + trial % 5, 2, rng);
        const auto p = oracle::random_powers(K, rng);
        const auto h = draw_channels(sc, rng);
        const auto obs = simulate_pilot_phase<double>(sc, p, 0.5, h, rng);
        const auto est = mmse_estimate<double>(sc, p, 0.5, obs);
        const RVec<double> l4 = centralized_lmmse_l4<double>(est, p, 0.5);
        const RVec<double> rs = stripe_sinr<double>(run_stripe<double>(est, p, 0.5), p, 0.5);
        for (int k = 0; k < K; ++k) CHECK(l4(k) >= rs(k) * (1 - 1e-9));
    }
}

TEST_CASE("L4 with one UE and perfect CSI reaches the matched-filter bound") {
    Rng rng(3);
    SimulationConfig c;
    c.num_aps = 5;
    c.num_ues = 1;
    c.correlation_model = CorrelationModel::Uncorrelated;
    const auto sc = build_scenario<double>(c, rng);
    const auto h = draw_channels(sc, rng);
    const auto est = perfect_csi(h);
    const double p = 0.05;
    const double sigma2 = c.noise_power_w;
    double energy = 0;
    for (int l = 0; l < 5; ++l) energy += h(0, l).squaredNorm();
    const RVec<double> l4 = centralized_lmmse_l4<double>(est, std::vector<double>{p}, sigma2);
    CHECK(std::abs(l4(0) / (p / sigma2 * energy) - 1.0) < 1e-10);
    // the stripe is also optimal here: a single UE without error reduces to MRC
    const RVec<double> rs = stripe_sinr<double>(run_stripe<double>(est, std::vector<double>{p}, sigma2),
                                                std::vector<double>{p}, sigma2);
    CHECK(std::abs(rs(0) / l4(0) - 1.0) < 1e-10);
}

TEST_CASE("L4 SINR matches the closed-form maximum") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const int K = 2 + trial % 3;
        const int L = 2 + trial % 2;
        const int N = 2;
        const auto sc = oracle::random_scenario(N, K, L, 2, rng);
        const auto p = oracle::random_powers(K, rng);
        const double sigma2 = 0.3;
        const auto h = draw_channels(sc, rng);
        const auto obs = simulate_pilot_phase<double>(sc, p, sigma2, h, rng);
        const auto est = mmse_estimate<double>(sc, p, sigma2, obs);
        const RVec<double> l4 = centralized_lmmse_l4<double>(est, p, sigma2);
        for (int k = 0; k < K; ++k) {
            const int D = N * L;
            CMatd C = CMatd::Identity(D, D) * sigma2;
            CVecd hk(D);
            for (int i = 0; i < K; ++i) {
                CVecd hi(D);
                for (int l = 0; l < L; ++l) {
                    hi.segment(l * N, N) = est.hhat(i, l);
                    C.block(l * N, l * N, N, N) += p[i] * est.rtilde(i, l);
                }
                if (i == k) hk = hi;
                else C += p[i] * hi * hi.adjoint();
            }
            const double expected = p[k] * std::real(hk.dot(C.inverse() * hk));
            CHECK(std::abs(l4(k) / expected - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("stacked combiner helpers") {
    Rng rng(5);
    const auto sc = oracle::random_scenario(2, 2, 3, 2, rng);
    const std::vector<double> p{1.0, 1.0};
    const auto h = draw_channels(sc, rng);
    const auto obs = simulate_pilot_phase<double>(sc, p, 0.1, h, rng);
    const auto est = mmse_estimate<double>(sc, p, 0.1, obs);
    const auto s = stack_estimates(est, 1);
    CHECK(s.dim() == 6);
    const CVecd w = standard_complex_normal<double>(6, rng);
    const CMatd E = s.error_covariance();
    CHECK(std::abs(s.error_quadratic_form(w) - std::real(w.dot(E * w))) < 1e-12 * w.squaredNorm() * E.norm());
    CHECK(E.block(0, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("MR with one UE, one AP and perfect CSI") {
    // With hhat = h, UatF closes to p N beta / (p beta + sigma2) for R = beta I.
    const double beta = 2.0;
    const double p = 0.5;
    const double sigma2 = 0.4;
    const int N = 4;
    Scenario<double> sc;
    sc.num_aps = 1;
    sc.antennas = N;
    sc.num_ues = 1;
    sc.pilot_length = 1;
    sc.covariance = UeApTable<CMatd>(1, 1, beta * CMatd::Identity(N, N));
    const auto sampler = make_channel_sampler(sc);
    Rng rng(6);
    MrStatistics<double> stats(1);
    for (int n = 0; n < 200000; ++n) {
        const auto h = draw_channels(sampler, rng);
        mr_l2_accumulate(stats, perfect_csi(h), h);
    }
    const double expected = p * N * beta / (p * beta + sigma2);
    const RVec<double> sinr = mr_l2_sinr<double>(stats, std::vector<double>{p}, sigma2);
    CHECK(std::abs(sinr(0) / expected - 1.0) < 0.02);
}

TEST_CASE("MR Monte Carlo bound converges to the closed form") {
    Rng rng(7);
    const auto sc = oracle::random_scenario(2, 4, 3, 2, rng);
    const auto p = oracle::random_powers(4, rng);
    const double sigma2 = 0.5;
    const auto expected = oracle::mr_uatf_closed_form(sc, p, sigma2);
    auto stats_ptr = std::make_shared<const EstimationStatistics<double>>(estimation_statistics<double>(sc, p, sigma2));
    const auto sampler = make_channel_sampler(sc);
    MrStatistics<double> a(4);
    MrStatistics<double> b(4);
    for (int n = 0; n < 100000; ++n) {
        const auto h = draw_channels(sampler, rng);
        const auto obs = simulate_pilot_phase<double>(sc, p, sigma2, h, rng);
        mr_l2_accumulate(n % 2 ? a : b, mmse_estimate<double>(stats_ptr, obs), h);
    }
    a.merge(b);
    CHECK(a.count == 100000);
    const RVec<double> sinr = mr_l2_sinr<double>(a, p, sigma2);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(sinr(k) / expected[k] - 1.0) < 0.03);
    const RVec<double> se = mr_l2_spectral_efficiency<double>(a, p, sigma2, 200, 20);
    for (int k = 0; k < 4; ++k) CHECK(se(k) == doctest::Approx(0.9 * std::log2(1 + sinr(k))));
}

TEST_CASE("MR with identical channels at every AP matches one AP at L-fold SNR") {
    const int L = 4;
    const double p = 1.0;
    const double sigma2 = 0.8;
    Scenario<double> one;
    one.num_aps = 1;
    one.antennas = 2;
    one.num_ues = 1;
    one.pilot_length = 1;
    one.covariance = UeApTable<CMatd>(1, 1, CMatd::Identity(2, 2));
    const auto sampler = make_channel_sampler(one);
    Rng rng(8);
    MrStatistics<double> fused(1);
    MrStatistics<double> single(1);
    for (int n = 0; n < 20000; ++n) {
        const auto h1 = draw_channels(sampler, rng);
        ChannelRealization<double> hL(1, L, h1(0, 0));
        mr_l2_accumulate(fused, perfect_csi(hL), hL);
        mr_l2_accumulate(single, perfect_csi(h1), h1);
    }
    const RVec<double> a = mr_l2_sinr<double>(fused, std::vector<double>{p}, sigma2);
    const RVec<double> b = mr_l2_sinr<double>(single, std::vector<double>{p}, sigma2 / L);
    CHECK(std::abs(a(0) / b(0) - 1.0) < 1e-10);
    CHECK_THROWS(mr_l2_sinr<double>(MrStatistics<double>(1), std::vector<double>{p}, sigma2));
}
