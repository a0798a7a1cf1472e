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

#include "radiostripe/config.hpp"
#include "radiostripe/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rstripe {

using Point3 = Eigen::Vector3d;

// Positions of the stripe's APs in stripe order. Each AP carries a
// half-wavelength ULA laid along its wall; boresight points into the room.
struct ApGeometry {
    std::vector<Point3> positions;
    std::vector<double> boresight_angles;  // azimuth of the inward wall normal
    std::vector<Eigen::Vector2d> array_axes;  // unit vector along the wall
    double spacing_m = 0.0;  // distance between consecutive APs along the stripe
};

struct PilotAssignment {
    std::vector<int> pilot_index;          // t_k in [0, tau_p)
    std::vector<std::vector<int>> copilot;  // S_k, sorted, always contains k
};

// Large-scale gain in dB of the urban-microcell model, referenced to 1 m.
inline double pathloss_db(double distance_m) {
    const double d = std::max(distance_m, 1.0);
    return -30.5 - 36.7 * std::log10(d);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Gaussian local scattering covariance of a half-wavelength ULA:
//   R(m,n) = beta exp(j pi (m-n) sin(phi)) exp(-(std^2/2) (pi (m-n) cos(phi))^2).
// Negative eigenvalues below -1e-12 beta (or 100 N eps beta in lower
// precision) are clipped and the trace restored.
template <typename Real>
CMat<Real> local_scattering_covariance(Real beta, Real nominal_angle, Real angular_std, int antennas) {
    if (!(beta > Real(0))) throw std::invalid_argument("local_scattering_covariance: beta must be positive");
    if (!(angular_std > Real(0))) {
        throw std::invalid_argument("local_scattering_covariance: angular_std must be positive");
    }
    if (antennas < 1) throw std::invalid_argument("local_scattering_covariance: need at least one antenna");

    const Real pi = std::numbers::pi_v<Real>;
    const Real s = std::sin(nominal_angle);
    const Real c = std::cos(nominal_angle);

    CMat<Real> R(antennas, antennas);
    for (int m = 0; m < antennas; ++m) {
        R(m, m) = Complex<Real>(beta, Real(0));
        for (int n = 0; n < m; ++n) {
            const Real dist = static_cast<Real>(m - n);
            const Real spread = pi * dist * c;
            const Real mag = beta * std::exp(-angular_std * angular_std / Real(2) * spread * spread);
            const Complex<Real> value = std::polar(mag, pi * dist * s);
            R(m, n) = value;
            R(n, m) = std::conj(value);
        }
    }
    if (antennas == 1) return R;

    Eigen::SelfAdjointEigenSolver<CMat<Real>> eig(R);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("local_scattering_covariance: eigen decomposition failed");
    }
    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real clip_below = -std::max(Real(1e-12), Real(100) * Real(antennas) * eps) * beta;
    if (eig.eigenvalues().minCoeff() < clip_below) {
        RVec<Real> lambda = eig.eigenvalues().cwiseMax(Real(0));
        lambda *= beta * static_cast<Real>(antennas) / lambda.sum();
        R = hermitian_part(eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint());
        Eigen::SelfAdjointEigenSolver<CMat<Real>> check(R, Eigen::EigenvaluesOnly);
        if (check.eigenvalues().minCoeff() < Real(100) * clip_below) {
            throw std::runtime_error("local_scattering_covariance: matrix is not positive semidefinite");
        }
    }
    return R;
}

ApGeometry place_aps(const SimulationConfig& config);
std::vector<Point3> drop_ues(const SimulationConfig& config, Rng& rng);
PilotAssignment assign_pilots(int num_ues, int pilot_length, Rng& rng);

// Azimuth of the UE seen from the AP, measured from the AP's boresight.
double nominal_angle(const ApGeometry& aps, int ap, const Point3& ue);

// Deterministic part of one drop. Immutable once built; safe to share
// read-only across workers.
template <typename Real>
struct Scenario {
    int num_aps = 0;
    int antennas = 0;
    int num_ues = 0;
    int pilot_length = 0;

    ApGeometry aps;
    std::vector<Point3> ue_positions;
    RMat<double> distance;  // K x L
    RMat<double> beta;      // K x L, linear
    RMat<double> angle;     // K x L, radians from boresight
    UeApTable<CMat<Real>> covariance;
    PilotAssignment pilots;

    const CMat<Real>& R(int k, int l) const { return covariance(k, l); }
};

template <typename Real>
Scenario<Real> assemble_scenario(const SimulationConfig& config, ApGeometry aps,
                                 std::vector<Point3> ues, PilotAssignment pilots) {
    const int K = static_cast<int>(ues.size());
    const int L = static_cast<int>(aps.positions.size());
    const int N = config.antennas_per_ap;
    if (static_cast<int>(pilots.pilot_index.size()) != K) {
        throw std::invalid_argument("assemble_scenario: pilot assignment does not match UE count");
    }

    Scenario<Real> sc;
    sc.num_aps = L;
    sc.antennas = N;
    sc.num_ues = K;
    sc.pilot_length = config.pilot_length;
    sc.distance.resize(K, L);
    sc.beta.resize(K, L);
    sc.angle.resize(K, L);
    sc.covariance = UeApTable<CMat<Real>>(K, L);

    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            const double d = (ues[k] - aps.positions[l]).norm();
            const double beta = db_to_linear(pathloss_db(d));
            const double phi = nominal_angle(aps, l, ues[k]);
            sc.distance(k, l) = d;
            sc.beta(k, l) = beta;
            sc.angle(k, l) = phi;
            if (config.correlation_model == CorrelationModel::Uncorrelated) {
                sc.covariance(k, l) = CMat<Real>::Identity(N, N) * static_cast<Real>(beta);
            } else {
                sc.covariance(k, l) = local_scattering_covariance<Real>(
                    static_cast<Real>(beta), static_cast<Real>(phi),
                    static_cast<Real>(config.angular_std_rad), N);
            }
        }
    }
    sc.aps = std::move(aps);
    sc.ue_positions = std::move(ues);
    sc.pilots = std::move(pilots);
    return sc;
}

// Geometry, pathloss, covariances and pilots for one drop. Draws UE
// positions first, then the pilot shuffle, from the same stream.
template <typename Real>
Scenario<Real> build_scenario(const SimulationConfig& config, Rng& rng) {
    config.validate();
    ApGeometry aps = place_aps(config);
    std::vector<Point3> ues = drop_ues(config, rng);
    PilotAssignment pilots = assign_pilots(config.num_ues, config.pilot_length, rng);
    return assemble_scenario<Real>(config, std::move(aps), std::move(ues), std::move(pilots));
}

}  // namespace rstripe
