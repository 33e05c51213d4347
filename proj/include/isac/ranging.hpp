// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: sensing performance analysis under random communication signaling
// Copyright (C) 2026 The isac-sim authors
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

#include <cstdint>

#include "isac/constellation.hpp"
#include "isac/pulse.hpp"
#include "isac/sensing.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// A transmit chain for ranging: basis followed by a Nyquist pulse.
struct RangingSetup {
    const ModulationBasis* basis = nullptr;
    const PulseSpec* pulse = nullptr;
};

struct WeakTargetOptions {
    double region_begin_m = 0.0;  // search window for the weak target
    double region_end_m = 0.0;
    long tolerance_bins = -1;     // |detected - true| allowed; < 0 means oversampling / 4
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

struct WeakTargetComparison {
    double detect_a = 0.0;  // P[weak target found in its bin], setup a
    double detect_b = 0.0;
    /// Relative ranging-error reduction of b over a:
    /// ((1 - detect_a) - (1 - detect_b)) / (1 - detect_a), 0 when both are error-free.
    double improvement = 0.0;
};

/// Probability that the strongest matched-filter bin inside the search
/// window is the weak target. The window must exclude the strong target bin.
double weak_target_detection(const RangeScene& scene, const RangingSetup& setup, const SymbolSource& source,
                             const WeakTargetOptions& options);

/// Compares two setups on common random numbers: trial i uses the same
/// symbols and noise for both.
WeakTargetComparison weak_target_improvement(const RangeScene& scene, const RangingSetup& a, const RangingSetup& b,
                                             const SymbolSource& source, const WeakTargetOptions& options);

/// Same basis, two pulses.
WeakTargetComparison weak_target_improvement(const RangeScene& scene, const PulseSpec& pulse_a,
                                             const PulseSpec& pulse_b, const ModulationBasis& basis,
                                             const SymbolSource& source, const WeakTargetOptions& options);

}  // namespace isac
