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
#include <limits>
#include <optional>
#include <vector>

#include "isac/constellation.hpp"
#include "isac/sensing.hpp"
#include "isac/types.hpp"

namespace isac {

/// Gaussian linear target-impulse-response model Y = G X + Z at the
/// mono-static receiver, with Z entries CN(0, noise_var) and, for LMMSE,
/// G entries i.i.d. CN(0, prior_var).
struct TirModel {
    std::size_t n_tx = 16;
    std::size_t n_rx = 16;
    double noise_var = 1.0;
    std::optional<double> prior_var;
    std::size_t frame_len = 32;

    void validate() const;
};

struct PrecodedFrame {
    CMatrix precoder;  // n_tx x n_s
    CMatrix symbols;   // n_s x L
    double power_budget = 1.0;

    CMatrix transmit() const { return precoder * symbols; }
    /// tr(X X^H) <= P L + 1e-6
    bool within_budget() const;
};

/// Downlink to the communication user.
struct CommLink {
    CMatrix channel;  // n_cu x n_tx
    double noise_var = 1.0;
    double rate_floor = 0.0;  // bits per channel use
};

enum class ErrorMetric { LSE, LMMSE };

std::string to_string(ErrorMetric metric);
ErrorMetric parse_error_metric(std::string_view name);

/// sigma^2 n_rx tr((X X^H)^-1); throws SingularMatrix when X X^H is rank
/// deficient (eigenvalues below 1e-10 lambda_max).
double lse_error(const CMatrix& x, const TirModel& model);
double lse_error(const PrecodedFrame& frame, const TirModel& model);

/// n_rx tr((I / prior_var + X X^H / sigma^2)^-1)
double lmmse_error(const CMatrix& x, const TirModel& model);
double lmmse_error(const PrecodedFrame& frame, const TirModel& model);

double instantaneous_error(const CMatrix& x, const TirModel& model, ErrorMetric metric);

struct ErgodicStats {
    SensingStats stats;               // over nonsingular frames
    std::size_t singular_frames = 0;  // LSE outages
};

/// Monte-Carlo ergodic error E_S[f(W; S)] over i.i.d. symbol blocks
/// S (n_s x L) drawn from `source`.
ErgodicStats ergodic_error(const CMatrix& precoder, const TirModel& model, const SymbolSource& source,
                           ErrorMetric metric, std::size_t trials, std::uint64_t seed,
                           double threshold = std::numeric_limits<double>::infinity());

/// Data-dependent precoder sqrt(P L / n_tx) (S S^H)^{-1/2}, making X X^H =
/// (P L / n_tx) I for every realization.
CMatrix ddp_precoder(const CMatrix& symbols, double power, std::size_t n_tx);

/// log2 det(I + H W W^H H^H / sigma_c^2)
double comm_rate(const CMatrix& precoder, const CommLink& link);

/// Water-filling capacity of the link under tr(W W^H) <= power.
double link_capacity(const CommLink& link, double power);

struct DipOptions {
    std::size_t sa_trials = 500;
    std::size_t iters = 300;  // projected-gradient steps per penalty stage
    std::uint64_t seed = 0;
    bool start_from_identity = false;  // otherwise a seeded random point on the power sphere
};

struct DipResult {
    CMatrix precoder;
    double objective = 0.0;  // sample-average error on the frozen sample set
    double rate = 0.0;       // comm_rate, when a link is given
    std::vector<double> objective_history;  // sensing objective per accepted step
    std::size_t iterations = 0;
};

/// Frozen sample set of symbol Gram matrices S S^H used by the sample-average
/// objective.
std::vector<CMatrix> frozen_grams(const SymbolSource& source, std::size_t n_s, std::size_t frame_len,
                                  std::size_t count, std::uint64_t seed);

/// Sample-average error of a fixed precoder over frozen grams; +inf when a
/// frame is singular under LSE.
double sample_average_error(const CMatrix& precoder, const std::vector<CMatrix>& grams, const TirModel& model,
                            ErrorMetric metric);

/// Data-independent precoder: projected gradient on the sample-average
/// error over the power ball tr(W W^H) <= power. With a link, the rate floor
/// is enforced by an exterior penalty of increasing weight; the best feasible
/// iterate is returned. Throws Infeasible when the floor exceeds capacity.
DipResult dip_precoder(const TirModel& model, const SymbolSource& source, double power, ErrorMetric metric,
                       const std::optional<CommLink>& comm, const DipOptions& options);

}  // namespace isac
