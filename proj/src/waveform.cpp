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

#include "isac/waveform.hpp"

#include <cmath>

namespace isac {

namespace {

CMatrix idft_matrix(std::size_t n) {
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix u(N, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index t = 0; t < N; ++t)
        for (Eigen::Index k = 0; k < N; ++k) {
            // reduce t*k mod n before scaling keeps the phase exact for large n
            const auto tk = static_cast<double>((t * k) % N);
            u(t, k) = std::polar(scale, 2.0 * kPi * tk / static_cast<double>(n));
        }
    return u;
}

// Balanced factorization L * M = n with both factors >= 2, L >= M.
std::optional<std::pair<std::size_t, std::size_t>> split_grid(std::size_t n) {
    for (auto m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))); m >= 2; --m)
        if (n % m == 0) return std::make_pair(n / m, m);
    return std::nullopt;
}

CMatrix otfs_matrix(std::size_t delay, std::size_t doppler) {
    const auto L = static_cast<Eigen::Index>(delay);
    const auto M = static_cast<Eigen::Index>(doppler);
    CMatrix u = CMatrix::Zero(L * M, L * M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(doppler));
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index k = 0; k < M; ++k)
                u(l + m * L, l + k * L) =
                    std::polar(scale, 2.0 * kPi * static_cast<double>((k * m) % M) / static_cast<double>(doppler));
    return u;
}

CMatrix chirp_diagonal_product(const CMatrix& f, double c1, double c2) {
    const Eigen::Index n = f.rows();
    CVector left(n), right(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto t2 = static_cast<double>(t) * static_cast<double>(t);
        left[t] = std::polar(1.0, 2.0 * kPi * c1 * t2);
        right[t] = std::polar(1.0, 2.0 * kPi * c2 * t2);
    }
    return left.asDiagonal() * f * right.asDiagonal();
}

}  // namespace

std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::SC: return "SC";
        case BasisKind::OFDM: return "OFDM";
        case BasisKind::OTFS: return "OTFS";
        case BasisKind::AFDM: return "AFDM";
    }
    return "?";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "SC") return BasisKind::SC;
    if (name == "OFDM") return BasisKind::OFDM;
    if (name == "OTFS") return BasisKind::OTFS;
    if (name == "AFDM") return BasisKind::AFDM;
    throw InvalidArgument("unknown modulation basis '" + std::string(name) + "'");
}

ModulationBasis build_basis(BasisKind kind, std::size_t n, BasisParams params) {
    if (n < 2) throw InvalidArgument("basis dimension must be at least 2");
    if (n > kMaxDenseBasis) throw InvalidArgument("basis dimension exceeds dense limit " + std::to_string(kMaxDenseBasis));
    const auto N = static_cast<Eigen::Index>(n);

    switch (kind) {
        case BasisKind::SC:
            return ModulationBasis(kind, params, CMatrix::Identity(N, N));
        case BasisKind::OFDM:
            return ModulationBasis(kind, params, idft_matrix(n));
        case BasisKind::OTFS: {
            if (params.delay_bins == 0 && params.doppler_bins == 0) {
                auto grid = split_grid(n);
                if (!grid) throw InvalidArgument("OTFS dimension " + std::to_string(n) + " is not factorizable");
                params.delay_bins = grid->first;
                params.doppler_bins = grid->second;
            } else if (params.delay_bins == 0 || params.doppler_bins == 0 ||
                       params.delay_bins * params.doppler_bins != n) {
                throw InvalidArgument("OTFS grid " + std::to_string(params.delay_bins) + " x " +
                                      std::to_string(params.doppler_bins) + " does not factor n = " + std::to_string(n));
            }
            return ModulationBasis(kind, params, otfs_matrix(params.delay_bins, params.doppler_bins));
        }
        case BasisKind::AFDM: {
            if (!params.chirp1) params.chirp1 = 1.0 / (2.0 * static_cast<double>(n));
            if (!params.chirp2) params.chirp2 = 0.0;
            if (!std::isfinite(*params.chirp1) || !std::isfinite(*params.chirp2))
                throw InvalidArgument("AFDM chirp rates must be finite");
            return ModulationBasis(kind, params, chirp_diagonal_product(idft_matrix(n), *params.chirp1, *params.chirp2));
        }
    }
    throw InvalidArgument("unknown basis kind");
}

SignalBlock modulate(const ModulationBasis& basis, const CVector& symbols) {
    if (static_cast<std::size_t>(symbols.size()) != basis.n())
        throw InvalidArgument("modulate: " + std::to_string(symbols.size()) + " symbols for a basis of size " +
                              std::to_string(basis.n()));
    return SignalBlock{basis.matrix() * symbols, symbols, basis.kind()};
}

double unitarity_defect(const ModulationBasis& basis) {
    const CMatrix& u = basis.matrix();
    const CMatrix gram = u * u.adjoint();
    return (gram - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

nlohmann::json basis_descriptor(const ModulationBasis& basis) {
    nlohmann::json params = nlohmann::json::object();
    const auto& p = basis.params();
    if (basis.kind() == BasisKind::OTFS) {
        params["delay_bins"] = p.delay_bins;
        params["doppler_bins"] = p.doppler_bins;
    } else if (basis.kind() == BasisKind::AFDM) {
        params["c1"] = p.chirp1.value_or(0.0);
        params["c2"] = p.chirp2.value_or(0.0);
    }
    return {{"kind", to_string(basis.kind())}, {"n", basis.n()}, {"params", params}};
}

}  // namespace isac
