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
#include <functional>
#include <limits>
#include <vector>

#include "isac/constellation.hpp"
#include "isac/pulse.hpp"
#include "isac/random.hpp"
#include "isac/types.hpp"
#include "isac/waveform.hpp"

namespace isac {

enum class AcfMode { periodic, aperiodic };

std::string to_string(AcfMode mode);
AcfMode parse_acf_mode(std::string_view name);

/// Autocorrelation r[k] = sum_n s[n] conj(s[n + k]).
///
/// Periodic values are stored for lags 0..N-1 (indices mod N). Aperiodic
/// values are stored for lags -(N-1)..N-1 at index k + N - 1.
class Acf {
  public:
    Acf(CVector values, AcfMode mode, bool normalized = false)
        : values_(std::move(values)), mode_(mode), normalized_(normalized) {}

    AcfMode mode() const { return mode_; }
    bool normalized() const { return normalized_; }
    const CVector& values() const { return values_; }

    /// Signal length N.
    std::size_t length() const {
        return mode_ == AcfMode::periodic ? static_cast<std::size_t>(values_.size())
                                          : static_cast<std::size_t>((values_.size() + 1) / 2);
    }
    cplx at(long lag) const;
    long min_lag() const { return mode_ == AcfMode::periodic ? 0 : -static_cast<long>(length() - 1); }
    long max_lag() const { return static_cast<long>(length()) - 1; }

    /// Divides by r[0].
    Acf normalize() const;

  private:
    CVector values_;
    AcfMode mode_;
    bool normalized_;
};

Acf acf(const CVector& signal, AcfMode mode);

/// |DFT(signal)|^2 with DFT(s)[m] = sum_n s[n] exp(-j 2 pi n m / N).
/// With the lag convention of Acf, psd[m] = sum_k r[k] exp(+j 2 pi k m / N).
RVector psd(const CVector& signal);

/// Integrated sidelobe level sum_{|k| >= exclude} |r[k]|^2 / |r[0]|^2.
/// For periodic ACFs the lag distance is min(k, N - k).
double isl(const Acf& r, std::size_t exclude_mainlobe_lags = 1);

/// Monte-Carlo summary of a random sensing loss.
struct SensingStats {
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double tail_prob = 0.0;  // P[loss >= threshold]
    double threshold = 0.0;
    std::size_t trials = 0;
    double ci_halfwidth = 0.0;  // 1.96 sqrt(variance / trials)
    std::uint64_t seed = 0;
};

/// Summarizes per-trial loss samples (in trial order).
SensingStats summarize(const std::vector<double>& samples, double threshold, std::uint64_t seed);

/// Draws loss_sampler(derive_seed(seed, i)) for i < trials.
SensingStats sensing_stats(const std::function<double(std::uint64_t)>& loss_sampler, double threshold,
                           std::size_t trials, std::uint64_t seed);

/// Per-lag mean and variance of |r[k]|^2, indexed like Acf::values().
struct AcfProfile {
    RVector mean;
    RVector variance;
    AcfMode mode = AcfMode::periodic;
    std::size_t trials = 0;

    long lag_at(Eigen::Index idx) const;
};

AcfProfile expected_acf_profile(const ModulationBasis& basis, const SymbolSource& source, std::size_t trials,
                                AcfMode mode, std::uint64_t seed);

/// Expected ISL over i.i.d. symbol blocks, each realization normalized by |r[0]|^2.
SensingStats eisl(const ModulationBasis& basis, const SymbolSource& source, std::size_t trials, AcfMode mode,
                  std::uint64_t seed, std::size_t exclude_mainlobe_lags = 1,
                  double threshold = std::numeric_limits<double>::infinity());

struct RangeTarget {
    double range_m = 0.0;
    cplx amplitude{1.0, 0.0};
};

struct RangeScene {
    std::vector<RangeTarget> targets;
    double sample_rate = 0.0;  // Hz, of the transmitted (shaped) signal
    double noise_power = 0.0;  // per complex sample
};

/// Matched-filter output |sum_n y[n + d] conj(x[n])|^2 / ||x||^4 per delay bin d.
struct RangeProfile {
    RVector range_m;  // c d / (2 fs)
    RVector power;
};

/// Delay bin of a range, rounded to the nearest sample.
long range_to_bin(double range_m, double sample_rate);
double bin_to_range(long bin, double sample_rate);

/// Synthesizes the echo of `signal` (circular delays, additive circular
/// Gaussian noise) and correlates it with the whole transmitted block. When a
/// pulse is given, `signal` holds symbol-rate samples that are shaped first and
/// scene.sample_rate must equal the pulse sample rate.
RangeProfile range_profile(const CVector& signal, const RangeScene& scene, const PulseSpec* pulse, Rng& rng);

}  // namespace isac
