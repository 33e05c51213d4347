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

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "isac/random.hpp"

namespace isac {

/// Worker count for Monte-Carlo loops: ISAC_THREADS if set, else the
/// hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("ISAC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `trial(rng, index)` for index in [0, trials), each with its own
/// generator seeded by derive_seed(seed, index). Results are returned in
/// index order, so any reduction over them is independent of scheduling.
template <class Fn>
auto run_trials(std::size_t trials, std::uint64_t seed, Fn&& trial)
    -> std::vector<decltype(trial(std::declval<Rng&>(), std::size_t{}))> {
    using Result = decltype(trial(std::declval<Rng&>(), std::size_t{}));
    std::vector<Result> out(trials);
    const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(trials, 1));

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(derive_seed(seed, i));
            out[i] = trial(rng, i);
        }
    };

    if (workers <= 1) {
        work(0, trials);
        return out;
    }

    // Chunks are contiguous, so the first failing chunk holds the
    // lowest failing index regardless of thread timing.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(trials, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

}  // namespace isac
