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

#include "isac/ranging.hpp"

#include <algorithm>
#include <cmath>

#include "isac/parallel.hpp"

namespace isac {

namespace {

struct SceneGeometry {
    long weak_bin = 0;
    long first_bin = 0;
    long last_bin = 0;
    long tolerance = 0;
};

SceneGeometry check_scene(const RangeScene& scene, const RangingSetup& setup, const WeakTargetOptions& options) {
    if (!setup.basis || !setup.pulse) throw InvalidArgument("ranging setup needs a basis and a pulse");
    if (scene.targets.size() < 2) throw InvalidArgument("weak-target scene needs at least two targets");
    auto weakest = std::min_element(scene.targets.begin(), scene.targets.end(),
                                    [](const auto& x, const auto& y) { return std::abs(x.amplitude) < std::abs(y.amplitude); });
    auto strongest = std::max_element(scene.targets.begin(), scene.targets.end(),
                                      [](const auto& x, const auto& y) { return std::abs(x.amplitude) < std::abs(y.amplitude); });
    if (std::abs(weakest->amplitude) == std::abs(strongest->amplitude))
        throw InvalidArgument("weak-target scene needs targets of distinct amplitudes");
    if (!(options.region_end_m > options.region_begin_m)) throw InvalidArgument("search window is empty");

    const double fs = scene.sample_rate;
    SceneGeometry g;
    g.weak_bin = range_to_bin(weakest->range_m, fs);
    g.first_bin = static_cast<long>(std::ceil(2.0 * options.region_begin_m / kSpeedOfLight * fs));
    g.last_bin = static_cast<long>(std::floor(2.0 * options.region_end_m / kSpeedOfLight * fs));
    g.tolerance = options.tolerance_bins >= 0 ? options.tolerance_bins
                                              : static_cast<long>(setup.pulse->oversampling / 4);
    const long strong_bin = range_to_bin(strongest->range_m, fs);
    if (g.first_bin > g.last_bin) throw InvalidArgument("search window contains no delay bins");
    if (strong_bin >= g.first_bin && strong_bin <= g.last_bin)
        throw InvalidArgument("search window must exclude the strong target");
    if (g.weak_bin < g.first_bin || g.weak_bin > g.last_bin)
        throw InvalidArgument("weak target lies outside the search window");
    return g;
}

bool detect(const RangeProfile& profile, const SceneGeometry& g) {
    const long last = std::min<long>(g.last_bin, profile.power.size() - 1);
    long best = g.first_bin;
    for (long d = g.first_bin; d <= last; ++d)
        if (profile.power[d] > profile.power[best]) best = d;
    return std::abs(best - g.weak_bin) <= g.tolerance;
}

std::pair<bool, bool> one_trial(const RangeScene& scene, const RangingSetup& a, const RangingSetup* b,
                                const SymbolSource& source, const SceneGeometry& ga, const SceneGeometry* gb,
                                std::uint64_t trial_seed) {
    Rng sym_rng(derive_seed(trial_seed, 0));
    const CVector symbols = source.draw(a.basis->n(), sym_rng);

    Rng noise_a(derive_seed(trial_seed, 1));
    const CVector xa = modulate(*a.basis, symbols).time_samples;
    const bool hit_a = detect(range_profile(xa, scene, a.pulse, noise_a), ga);
    if (!b) return {hit_a, false};

    Rng noise_b(derive_seed(trial_seed, 1));
    const CVector xb = modulate(*b->basis, symbols).time_samples;
    const bool hit_b = detect(range_profile(xb, scene, b->pulse, noise_b), *gb);
    return {hit_a, hit_b};
}

}  // namespace

double weak_target_detection(const RangeScene& scene, const RangingSetup& setup, const SymbolSource& source,
                             const WeakTargetOptions& options) {
    const SceneGeometry g = check_scene(scene, setup, options);
    if (options.trials == 0) throw InvalidArgument("weak-target detection needs at least one trial");
    auto hits = run_trials(options.trials, options.seed, [&](Rng&, std::size_t i) {
        return one_trial(scene, setup, nullptr, source, g, nullptr, derive_seed(options.seed, i)).first ? 1 : 0;
    });
    std::size_t count = 0;
    for (int h : hits) count += static_cast<std::size_t>(h);
    return static_cast<double>(count) / static_cast<double>(options.trials);
}

WeakTargetComparison weak_target_improvement(const RangeScene& scene, const RangingSetup& a, const RangingSetup& b,
                                             const SymbolSource& source, const WeakTargetOptions& options) {
    const SceneGeometry ga = check_scene(scene, a, options);
    const SceneGeometry gb = check_scene(scene, b, options);
    if (a.basis->n() != b.basis->n()) throw InvalidArgument("compared setups must share the block length");
    if (options.trials == 0) throw InvalidArgument("weak-target comparison needs at least one trial");
    auto hits = run_trials(options.trials, options.seed, [&](Rng&, std::size_t i) {
        return one_trial(scene, a, &b, source, ga, &gb, derive_seed(options.seed, i));
    });
    std::size_t ca = 0, cb = 0;
    for (const auto& [ha, hb] : hits) {
        ca += ha ? 1 : 0;
        cb += hb ? 1 : 0;
    }
    WeakTargetComparison out;
    out.detect_a = static_cast<double>(ca) / static_cast<double>(options.trials);
    out.detect_b = static_cast<double>(cb) / static_cast<double>(options.trials);
    const double err_a = 1.0 - out.detect_a;
    const double err_b = 1.0 - out.detect_b;
    out.improvement = err_a > 0.0 ? (err_a - err_b) / err_a : 0.0;
    return out;
}

WeakTargetComparison weak_target_improvement(const RangeScene& scene, const PulseSpec& pulse_a,
                                             const PulseSpec& pulse_b, const ModulationBasis& basis,
                                             const SymbolSource& source, const WeakTargetOptions& options) {
    return weak_target_improvement(scene, RangingSetup{&basis, &pulse_a}, RangingSetup{&basis, &pulse_b}, source,
                                   options);
}

}  // namespace isac
