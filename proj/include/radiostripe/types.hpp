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

#include <Eigen/Dense>

#include <cassert>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace rstripe {

// Read-only view whose element type is not deduced, so std::vector arguments bind.
template <typename Real>
using ConstSpan = std::span<const std::type_identity_t<Real>>;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

// Dense K x L table indexed by (UE, AP), row-major over UEs.
template <typename T>
class UeApTable {
public:
    UeApTable() = default;
    UeApTable(int num_ues, int num_aps, const T& init = T{})
        : num_ues_(num_ues), num_aps_(num_aps),
          data_(static_cast<std::size_t>(num_ues) * static_cast<std::size_t>(num_aps), init) {}

    int num_ues() const { return num_ues_; }
    int num_aps() const { return num_aps_; }

    T& operator()(int k, int l) { return data_[index(k, l)]; }
    const T& operator()(int k, int l) const { return data_[index(k, l)]; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

private:
    std::size_t index(int k, int l) const {
        assert(k >= 0 && k < num_ues_ && l >= 0 && l < num_aps_);
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(num_aps_) +
               static_cast<std::size_t>(l);
    }

    int num_ues_ = 0;
    int num_aps_ = 0;
    std::vector<T> data_;
};

// Independent generator keyed on a base seed and a list of stream indices, e.g.
// (setup, block). The same key always yields the same stream.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * key.size());
    auto push64 = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push64(seed);
    for (std::uint64_t k : key) push64(k);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

// Standard circularly symmetric complex Gaussian vector, CN(0, I).
template <typename Real>
CVec<Real> standard_complex_normal(Eigen::Index n, Rng& rng) {
    std::normal_distribution<Real> dist(Real(0), std::sqrt(Real(0.5)));
    CVec<Real> w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Real re = dist(rng);
        const Real im = dist(rng);
        w(i) = Complex<Real>(re, im);
    }
    return w;
}

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) {
    return ((m + m.adjoint()) / typename Derived::RealScalar(2)).eval();
}

}  // namespace rstripe
