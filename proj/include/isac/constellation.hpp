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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "isac/random.hpp"
#include "isac/types.hpp"

namespace isac {

struct MomentReport {
    double power = 0.0;          // E|x|^2
    double fourth_moment = 0.0;  // E|x|^4
    double kurtosis = 0.0;       // E|x|^4 / (E|x|^2)^2
    double entropy_bits = 0.0;
};

/// Finite complex alphabet with a probability vector. Immutable.
class Constellation {
  public:
    /// Probabilities must be nonnegative and sum to one within 1e-9; they are
    /// renormalized to sum exactly. Points must be pairwise distinct.
    Constellation(std::vector<cplx> points, std::vector<double> probs, std::string label);

    const std::vector<cplx>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return points_.size(); }

    /// Same points, new probability vector.
    Constellation with_probs(std::vector<double> probs) const;

    /// Points scaled so that sum p_i |x_i|^2 = 1.
    Constellation normalize_power() const;

  private:
    std::vector<cplx> points_;
    std::vector<double> probs_;
    std::string label_;
};

/// Builds a power-normalized standard alphabet. Labels: "BPSK", "QPSK",
/// "<M>PSK" and square "<M>QAM" (M = 4, 16, 64, 256, ...). QAM points are
/// ordered row-major over the odd-integer I/Q grid.
Constellation make_standard(std::string_view label, const std::optional<std::vector<double>>& probs = std::nullopt);

MomentReport moments(const Constellation& c);

/// i.i.d. draws by inverse CDF over the probability vector.
CVector sample_block(const Constellation& c, std::size_t n, std::uint64_t seed);
CVector sample_block(const Constellation& c, std::size_t n, Rng& rng);

/// Symbol law for random signaling: either a discrete constellation or the
/// unit-power circular Gaussian codebook.
class SymbolSource {
  public:
    static SymbolSource gaussian() { return SymbolSource(); }
    static SymbolSource from(Constellation c) { return SymbolSource(std::move(c)); }

    bool is_gaussian() const { return !constellation_.has_value(); }
    const Constellation& constellation() const;
    std::string label() const { return is_gaussian() ? "gaussian" : constellation_->label(); }

    CVector draw(std::size_t n, Rng& rng) const;
    CMatrix draw(std::size_t rows, std::size_t cols, Rng& rng) const;

  private:
    SymbolSource() = default;
    explicit SymbolSource(Constellation c) : constellation_(std::move(c)) {}
    std::optional<Constellation> constellation_;
};

// JSON form: {"label": ..., "points": [[re, im], ...], "probs": [...]}
void to_json(nlohmann::json& j, const Constellation& c);
Constellation constellation_from_json(const nlohmann::json& j);

}  // namespace isac
