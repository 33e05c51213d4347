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
#include <random>
#include <string_view>

#include "isac/types.hpp"

namespace isac {

/// splitmix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for trial `index` of a stream rooted at `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Child seed for pipeline `name`, trial `index`, rooted at `root`.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index);

/// Seeded generator with platform-independent output.
///
/// std::mt19937_64 has a standard-mandated sequence, but the standard
/// distributions do not, so the uniform and Gaussian transforms are done here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, second value cached).
    double normal();

    /// Circular complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance = 1.0);

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace isac
