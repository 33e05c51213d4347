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

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "isac/types.hpp"

namespace isac {

enum class BasisKind { SC, OFDM, OTFS, AFDM };

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

/// Kind-specific parameters. Unset fields take defaults in build_basis.
struct BasisParams {
    std::size_t delay_bins = 0;    // OTFS L
    std::size_t doppler_bins = 0;  // OTFS M, L * M == n
    std::optional<double> chirp1;  // AFDM c1, default 1 / (2n)
    std::optional<double> chirp2;  // AFDM c2, default 0
};

/// Unitary n x n matrix mapping data symbols to time samples.
///
/// Conventions shared by every module:
///   OFDM  U[t, k] = exp(+j 2 pi t k / n) / sqrt(n)
///   OTFS  delay-major vectorization, t = l + m L and symbol index l + k L,
///         U[l + m L, l + k L] = exp(+j 2 pi k m / M) / sqrt(M)
///   AFDM  U = diag(exp(j 2 pi c1 t^2)) * F^H * diag(exp(j 2 pi c2 k^2))
class ModulationBasis {
  public:
    ModulationBasis(BasisKind kind, BasisParams params, CMatrix matrix)
        : kind_(kind), params_(params), matrix_(std::move(matrix)) {}

    BasisKind kind() const { return kind_; }
    std::size_t n() const { return static_cast<std::size_t>(matrix_.rows()); }
    const BasisParams& params() const { return params_; }
    const CMatrix& matrix() const { return matrix_; }

  private:
    BasisKind kind_;
    BasisParams params_;  // fully resolved
    CMatrix matrix_;
};

struct SignalBlock {
    CVector time_samples;
    CVector source_symbols;
    BasisKind basis_kind;
};

inline constexpr std::size_t kMaxDenseBasis = 4096;

ModulationBasis build_basis(BasisKind kind, std::size_t n, BasisParams params = {});

SignalBlock modulate(const ModulationBasis& basis, const CVector& symbols);

/// max |(U U^H - I)_{ij}|
double unitarity_defect(const ModulationBasis& basis);

/// Descriptor {kind, n, params}; the matrix itself is never serialized.
nlohmann::json basis_descriptor(const ModulationBasis& basis);

}  // namespace isac
