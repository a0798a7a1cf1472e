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

#include "radiostripe/scenario.hpp"

#include <array>
#include <numeric>

namespace rstripe {

namespace {

struct Wall {
    Eigen::Vector2d start;
    Eigen::Vector2d axis;
    Eigen::Vector2d normal;
};

// Counter-clockwise walk around the square, starting at the origin corner.
std::array<Wall, 4> walls(double side) {
    return {{
        {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
        {{side, 0.0}, {0.0, 1.0}, {-1.0, 0.0}},
        {{side, side}, {-1.0, 0.0}, {0.0, -1.0}},
        {{0.0, side}, {0.0, -1.0}, {1.0, 0.0}},
    }};
}

}  // namespace

ApGeometry place_aps(const SimulationConfig& config) {
    if (!(config.stripe_length_m > 0.0) || !(config.ap_ue_height_gap_m > 0.0)) {
        throw ConfigError("place_aps: geometry must be positive");
    }
    const int L = config.num_aps;
    const double side = config.square_side_m();
    const auto room = walls(side);

    ApGeometry g;
    g.spacing_m = config.stripe_length_m / L;
    g.positions.reserve(L);
    for (int l = 0; l < L; ++l) {
        // Half-spacing offset keeps APs off the corners.
        const double s = (l + 0.5) * g.spacing_m;
        const int w = std::min(static_cast<int>(s / side), 3);
        const Wall& wall = room[w];
        const Eigen::Vector2d xy = wall.start + (s - w * side) * wall.axis;
        g.positions.emplace_back(xy.x(), xy.y(), config.ap_ue_height_gap_m);
        g.boresight_angles.push_back(std::atan2(wall.normal.y(), wall.normal.x()));
        g.array_axes.push_back(wall.axis);
    }
    return g;
}

std::vector<Point3> drop_ues(const SimulationConfig& config, Rng& rng) {
    std::uniform_real_distribution<double> coord(0.0, config.square_side_m());
    std::vector<Point3> ues;
    ues.reserve(config.num_ues);
    for (int k = 0; k < config.num_ues; ++k) {
        const double x = coord(rng);
        const double y = coord(rng);
        ues.emplace_back(x, y, 0.0);
    }
    return ues;
}

PilotAssignment assign_pilots(int num_ues, int pilot_length, Rng& rng) {
    if (pilot_length < 1) throw std::invalid_argument("assign_pilots: pilot_length must be positive");
    PilotAssignment p;
    p.pilot_index.assign(num_ues, 0);
    if (num_ues <= pilot_length) {
        std::iota(p.pilot_index.begin(), p.pilot_index.end(), 0);
    } else {
        std::vector<int> order(num_ues);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (int j = 0; j < num_ues; ++j) p.pilot_index[order[j]] = j % pilot_length;
    }
    p.copilot.resize(num_ues);
    for (int k = 0; k < num_ues; ++k) {
        for (int i = 0; i < num_ues; ++i) {
            if (p.pilot_index[i] == p.pilot_index[k]) p.copilot[k].push_back(i);
        }
    }
    return p;
}

double nominal_angle(const ApGeometry& aps, int ap, const Point3& ue) {
    const Eigen::Vector2d d = ue.head<2>() - aps.positions[ap].head<2>();
    const double theta = aps.boresight_angles[ap];
    const Eigen::Vector2d normal(std::cos(theta), std::sin(theta));
    return std::atan2(d.dot(aps.array_axes[ap]), d.dot(normal));
}

}  // namespace rstripe
