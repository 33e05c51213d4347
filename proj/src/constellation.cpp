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

#include "isac/constellation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace isac {

namespace {

constexpr double kProbSumTolerance = 1e-9;

std::vector<double> checked_probs(std::vector<double> probs, std::size_t n) {
    if (probs.size() != n)
        throw InvalidArgument("probability vector has " + std::to_string(probs.size()) + " entries, expected " +
                              std::to_string(n));
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("probabilities must be finite and nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance)
        throw InvalidArgument("probabilities sum to " + std::to_string(sum) + ", not 1");
    for (double& p : probs) p /= sum;
    return probs;
}

std::optional<unsigned> parse_order(std::string_view digits) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
    return value;
}

std::vector<cplx> psk_points(unsigned m) {
    std::vector<cplx> pts(m);
    // QPSK sits on the diagonals so it coincides with 4-QAM
    const double offset = (m == 4) ? kPi / 4.0 : 0.0;
    for (unsigned k = 0; k < m; ++k) pts[k] = std::polar(1.0, offset + 2.0 * kPi * k / m);
    return pts;
}

std::vector<cplx> qam_points(unsigned m) {
    const auto side = static_cast<unsigned>(std::lround(std::sqrt(static_cast<double>(m))));
    if (side * side != m || side < 2 || side % 2 != 0)
        throw InvalidArgument("QAM order must be an even square, got " + std::to_string(m));
    std::vector<cplx> pts;
    pts.reserve(m);
    for (unsigned r = 0; r < side; ++r) {
        const double q = -static_cast<double>(side - 1) + 2.0 * r;
        for (unsigned c = 0; c < side; ++c) {
            const double i = -static_cast<double>(side - 1) + 2.0 * c;
            pts.emplace_back(i, q);
        }
    }
    return pts;
}

}  // namespace

Constellation::Constellation(std::vector<cplx> points, std::vector<double> probs, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
    if (points_.size() < 2) throw InvalidArgument("a constellation needs at least two points");
    probs_ = checked_probs(std::move(probs), points_.size());
    for (const auto& p : points_)
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw InvalidArgument("non-finite constellation point");
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (points_[i] == points_[j])
                throw InvalidArgument("constellation points " + std::to_string(i) + " and " + std::to_string(j) +
                                      " coincide");
}

Constellation Constellation::with_probs(std::vector<double> probs) const {
    return Constellation(points_, std::move(probs), label_);
}

Constellation Constellation::normalize_power() const {
    double power = 0.0;
    for (std::size_t i = 0; i < size(); ++i) power += probs_[i] * std::norm(points_[i]);
    if (!(power > 0.0)) throw InvalidArgument("cannot normalize a zero-power constellation");
    const double scale = 1.0 / std::sqrt(power);
    std::vector<cplx> pts(points_);
    for (auto& p : pts) p *= scale;
    return Constellation(std::move(pts), probs_, label_);
}

Constellation make_standard(std::string_view label, const std::optional<std::vector<double>>& probs) {
    std::vector<cplx> pts;
    if (label == "BPSK") {
        pts = psk_points(2);
    } else if (label == "QPSK") {
        pts = psk_points(4);
    } else if (label.size() > 3 && label.substr(label.size() - 3) == "PSK") {
        auto m = parse_order(label.substr(0, label.size() - 3));
        if (!m || *m < 2) throw InvalidArgument("unknown constellation label '" + std::string(label) + "'");
        pts = psk_points(*m);
    } else if (label.size() > 3 && label.substr(label.size() - 3) == "QAM") {
        auto m = parse_order(label.substr(0, label.size() - 3));
        if (!m) throw InvalidArgument("unknown constellation label '" + std::string(label) + "'");
        pts = qam_points(*m);
    } else {
        throw InvalidArgument("unknown constellation label '" + std::string(label) + "'");
    }
    std::vector<double> p = probs ? *probs : std::vector<double>(pts.size(), 1.0 / static_cast<double>(pts.size()));
    return Constellation(std::move(pts), std::move(p), std::string(label)).normalize_power();
}

MomentReport moments(const Constellation& c) {
    MomentReport r;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double p = c.probs()[i];
        const double a2 = std::norm(c.points()[i]);
        r.power += p * a2;
        r.fourth_moment += p * a2 * a2;
        if (p > 0.0) r.entropy_bits -= p * std::log2(p);
    }
    r.kurtosis = r.fourth_moment / (r.power * r.power);
    return r;
}

CVector sample_block(const Constellation& c, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_block(c, n, rng);
}

CVector sample_block(const Constellation& c, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidArgument("sample_block: n must be at least 1");
    std::vector<double> cdf(c.size());
    std::partial_sum(c.probs().begin(), c.probs().end(), cdf.begin());
    CVector out(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        // guards against cdf.back() landing slightly below 1
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), c.size() - 1);
        while (c.probs()[idx] == 0.0 && idx > 0) --idx;
        out[static_cast<Eigen::Index>(k)] = c.points()[idx];
    }
    return out;
}

const Constellation& SymbolSource::constellation() const {
    if (!constellation_) throw InvalidArgument("Gaussian symbol source has no constellation");
    return *constellation_;
}

CVector SymbolSource::draw(std::size_t n, Rng& rng) const {
    if (constellation_) return sample_block(*constellation_, n, rng);
    CVector out(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = rng.complex_normal();
    return out;
}

CMatrix SymbolSource::draw(std::size_t rows, std::size_t cols, Rng& rng) const {
    // column-major fill keeps the draw order identical to draw(rows * cols)
    CVector flat = draw(rows * cols, rng);
    return Eigen::Map<CMatrix>(flat.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void to_json(nlohmann::json& j, const Constellation& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points()) pts.push_back({p.real(), p.imag()});
    j = nlohmann::json{{"label", c.label()}, {"points", pts}, {"probs", c.probs()}};
}

Constellation constellation_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("constellation JSON must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "label" && key != "points" && key != "probs")
            throw InvalidArgument("unknown constellation field '" + key + "'");
    if (!j.contains("points") || !j.contains("probs")) throw InvalidArgument("constellation JSON needs points and probs");
    std::vector<cplx> pts;
    for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 2) throw InvalidArgument("constellation point must be [re, im]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return Constellation(std::move(pts), j.at("probs").get<std::vector<double>>(), j.value("label", std::string("custom")));
}

}  // namespace isac
