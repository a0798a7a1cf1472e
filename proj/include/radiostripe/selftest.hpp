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

#include <string>
#include <vector>

namespace rstripe {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestOptions {
    // Leaves a small non-Hermitian perturbation in every error covariance, as
    // if symmetrization had been skipped. The decomposition check must catch it.
    bool inject_fault = false;
    int realizations = 200;
};

// Fast invariant suite on a tiny contaminated instance (3 APs, 2 antennas,
// 3 UEs sharing 2 pilots).
std::vector<CheckResult> run_selftest(const SelftestOptions& options = {});

}  // namespace rstripe
