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

#include "radiostripe/selftest.hpp"

#include "radiostripe/baselines.hpp"
#include "radiostripe/channel.hpp"
#include "radiostripe/metrics.hpp"
#include "radiostripe/scenario.hpp"
#include "radiostripe/stripe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rstripe {

namespace {

SimulationConfig tiny_config() {
    SimulationConfig c;
    c.num_aps = 3;
    c.antennas_per_ap = 2;
    c.num_ues = 3;
    c.pilot_length = 2;
    c.coherence_block = 20;
    c.stripe_length_m = 80.0;
    c.rng_seed = 20260101;
    return c;
}

std::string worst(const char* what, double value) {
    std::ostringstream s;
    s << what << " " << value;
    return s.str();
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
    const SimulationConfig cfg = tiny_config();
    const double sigma2 = cfg.noise_power_w;
    const std::vector<double> powers = cfg.powers();
    Rng setup_rng = make_stream(cfg.rng_seed, {0});
    const auto sc = build_scenario<double>(cfg, setup_rng);
    auto stats = estimation_statistics<double>(sc, powers, sigma2);

    if (options.inject_fault) {
        Rng fault_rng = make_stream(cfg.rng_seed, {99});
        for (int k = 0; k < sc.num_ues; ++k) {
            for (int l = 0; l < sc.num_aps; ++l) {
                const double beta = sc.beta(k, l);
                CMat<double> skew = CMat<double>::Zero(sc.antennas, sc.antennas);
                for (int c = 1; c < sc.antennas; ++c) skew(0, c) = standard_complex_normal<double>(1, fault_rng)(0);
                stats.rtilde(k, l) = sc.R(k, l) - stats.rhat(k, l) + 1e-6 * beta * skew;
            }
        }
    }
    auto shared = std::make_shared<const EstimationStatistics<double>>(std::move(stats));

    std::vector<CheckResult> checks;

    {
        double err = 0.0;
        double skew = 0.0;
        for (int k = 0; k < sc.num_ues; ++k) {
            for (int l = 0; l < sc.num_aps; ++l) {
                const double scale = sc.R(k, l).cwiseAbs().maxCoeff();
                err = std::max(err, (shared->rhat(k, l) + shared->rtilde(k, l) - sc.R(k, l)).cwiseAbs().maxCoeff() / scale);
                skew = std::max(skew, (shared->rtilde(k, l) - shared->rtilde(k, l).adjoint()).cwiseAbs().maxCoeff() / scale);
            }
        }
        checks.push_back({"covariance decomposition Rhat + Rtilde = R", err < 1e-10 && skew < 1e-12,
                          worst("max relative error", std::max(err, skew))});
    }

    const auto sampler = make_channel_sampler(sc);
    double norm_err = 0.0;
    double recon_err = 0.0;
    double psi_err = 0.0;
    double monotone_violation = 0.0;
    double l4_violation = 0.0;
    for (int b = 0; b < options.realizations; ++b) {
        Rng rng = make_stream(cfg.rng_seed, {1, static_cast<std::uint64_t>(b)});
        const auto h = draw_channels(sampler, rng);
        const auto obs = simulate_pilot_phase<double>(sc, powers, sigma2, h, rng);
        const auto est = mmse_estimate<double>(shared, obs);
        const auto payload = draw_payload<double>(h, powers, sigma2, rng);

        StripeTrace<double> trace;
        const auto final_state = run_stripe<double>(est, powers, sigma2, &payload, &h, &trace);

        for (const auto& V : trace.combiners) {
            for (Eigen::Index k = 0; k < V.cols(); ++k) norm_err = std::max(norm_err, std::abs(V.col(k).norm() - 1.0));
        }

        for (int k = 0; k < sc.num_ues; ++k) {
            std::complex<double> rebuilt = final_state.effective_noise(k);
            double scale = std::abs(final_state.soft_estimate(k));
            for (int i = 0; i < sc.num_ues; ++i) {
                const auto ghat = final_state.channel_estimate(i, k);
                const auto gtilde = final_state.true_channel(i, k) - ghat;
                rebuilt += (ghat + gtilde) * payload.symbols(i);
                scale = std::max(scale, std::abs(ghat * payload.symbols(i)));
            }
            recon_err = std::max(recon_err, std::abs(final_state.soft_estimate(k) - rebuilt) / scale);
        }

        // psi from the explicit block-diagonal matrix of each stage.
        for (std::size_t l = 1; l < trace.stages.size(); ++l) {
            for (int k = 0; k < sc.num_ues; ++k) {
                const auto info = build_augmented_moments(est, static_cast<int>(l), k, trace.stages[l - 1]);
                const CVec<double> v = trace.combiners[l].col(k);
                for (int i = 0; i < sc.num_ues; ++i) {
                    const double direct = std::real(v.dot(info.error_covariance(i) * v));
                    const double rec = trace.stages[l].error_variance(i, k);
                    psi_err = std::max(psi_err, std::abs(direct - rec) / std::max(std::abs(direct), 1e-300));
                }
            }
        }

        RVec<double> prev = stripe_sinr(trace.stages.front(), powers, sigma2);
        for (std::size_t l = 1; l < trace.stages.size(); ++l) {
            const RVec<double> cur = stripe_sinr(trace.stages[l], powers, sigma2);
            for (Eigen::Index k = 0; k < cur.size(); ++k) {
                monotone_violation = std::max(monotone_violation, (prev(k) - cur(k)) / std::max(prev(k), 1e-300));
            }
            prev = cur;
        }

        const RVec<double> l4 = centralized_lmmse_l4<double>(est, powers, sigma2);
        for (Eigen::Index k = 0; k < l4.size(); ++k) {
            l4_violation = std::max(l4_violation, (prev(k) - l4(k)) / std::max(prev(k), 1e-300));
        }
    }

    checks.push_back({"combiner unit norm", norm_err < 1e-12, worst("max | ||v|| - 1 |", norm_err)});
    checks.push_back({"soft-estimate reconstruction", recon_err < 1e-10, worst("max relative error", recon_err)});
    checks.push_back({"error-variance recursion", psi_err < 1e-12, worst("max relative error", psi_err)});
    checks.push_back({"monotone stage SINR", monotone_violation < 1e-9, worst("max relative drop", monotone_violation)});
    checks.push_back({"centralized SINR dominates stripe", l4_violation < 1e-9, worst("max relative excess", l4_violation)});
    return checks;
}

}  // namespace rstripe
