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

#include <cmath>
#include <cstdint>
#include <vector>

#include "isac/constellation.hpp"

namespace isac {

/// Complex AWGN channel Y = X + N, N ~ CN(0, noise_variance).
struct AwgnChannel {
    double noise_variance = 1.0;

    static AwgnChannel from_snr_db(double snr_db) { return AwgnChannel{std::pow(10.0, -snr_db / 10.0)}; }
    /// SNR for unit transmit power.
    double snr_db() const { return -10.0 * std::log10(noise_variance); }
};

enum class MiMethod { quadrature, monte_carlo };

/// Tensor Gauss-Hermite rule for E[f(N)], N ~ CN(0, noise_variance).
struct NoiseQuadrature {
    std::vector<cplx> nodes;
    std::vector<double> weights;  // sum to 1
};

NoiseQuadrature gauss_hermite_noise(std::size_t order, double noise_variance);

/// I(X; Y) in bits. `order_or_trials` is the per-dimension quadrature order
/// (>= 8) or the Monte-Carlo sample count (>= 1e4).
double mutual_information(const Constellation& c, const AwgnChannel& ch, MiMethod method = MiMethod::quadrature,
                          std::size_t order_or_trials = 16, std::uint64_t seed = 0);

/// D_i = E[log p(Y | x_i) / p(Y)] in nats for every point, by quadrature.
std::vector<double> point_divergences(const Constellation& c, const NoiseQuadrature& q, double noise_variance);

/// Smallest kurtosis reachable on the alphabet at unit power (a linear
/// program in the probabilities; optimal vertices mix at most two moduli).
double min_kurtosis(const Constellation& c);

struct ShapingProblem {
    Constellation base;  // points fixed; power constrained to exactly 1
    double kurtosis_cap = 2.0;
    AwgnChannel channel;
    double tolerance = 1e-9;  // stop when the MI gain of one iteration drops below this (bits)
    std::size_t max_iters = 2000;
    std::size_t quadrature_order = 16;
};

struct ShapingResult {
    std::vector<double> probs;
    double mi_bits = 0.0;
    double achieved_kurtosis = 0.0;
    double lambda_power = 0.0;
    double lambda_kurtosis = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// False when the cap lies below min_kurtosis(base); the solver then
    /// targets effective_cap = min_kurtosis + kCapMargin instead.
    bool cap_attainable = true;
    double effective_cap = 0.0;
    std::vector<double> mi_history;  // MI (bits) after every iteration
};

inline constexpr double kCapMargin = 1e-4;

/// Maximizes I(X; Y) over the point probabilities subject to E|X|^2 = 1 and
/// E|X|^4 <= cap by Blahut-Arimoto steps p_i <- p_i exp(D_i - l1 |x_i|^2 -
/// l2 |x_i|^4) / Z with the multipliers found by nested bisection.
ShapingResult shape(const ShapingProblem& problem);

struct FrontierPoint {
    double kappa_target = 0.0;
    ShapingResult result;
};

/// One shaping run per cap; caps must be sorted ascending and >= 1.
std::vector<FrontierPoint> tradeoff_frontier(const Constellation& base, const AwgnChannel& ch,
                                             const std::vector<double>& kappas, double tolerance = 1e-9,
                                             std::size_t max_iters = 2000, std::size_t quadrature_order = 16);

}  // namespace isac
