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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include <json.hpp>

#include "isac/constellation.hpp"
#include "isac/random.hpp"

using namespace isac;

namespace {

// Independent enumeration of a square QAM grid: kurtosis from integer moments.
double qam_kurtosis_by_enumeration(int m) {
    const int side = static_cast<int>(std::lround(std::sqrt(m)));
    double p2 = 0.0, p4 = 0.0;
    for (int a = -(side - 1); a <= side - 1; a += 2)
        for (int b = -(side - 1); b <= side - 1; b += 2) {
            const double e = static_cast<double>(a * a + b * b);
            p2 += e;
            p4 += e * e;
        }
    p2 /= m;
    p4 /= m;
    return p4 / (p2 * p2);
}

}  // namespace

TEST_CASE("QAM kurtosis matches enumeration") {
    for (int m : {4, 16, 64, 256}) {
        const auto rep = moments(make_standard(std::to_string(m) + "QAM"));
        REQUIRE(rep.kurtosis == Catch::Approx(qam_kurtosis_by_enumeration(m)).epsilon(1e-12));
        REQUIRE(rep.power == Catch::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(moments(make_standard("16QAM")).kurtosis == Catch::Approx(1.32).margin(1e-12));
    REQUIRE(moments(make_standard("64QAM")).kurtosis == Catch::Approx(435.0 / 315.0).margin(1e-12));
}

TEST_CASE("PSK alphabets have unit kurtosis and unit modulus") {
    for (const char* label : {"BPSK", "QPSK", "8PSK", "16PSK"}) {
        const auto c = make_standard(label);
        REQUIRE(std::abs(moments(c).kurtosis - 1.0) < 1e-12);
        for (const auto& p : c.points()) REQUIRE(std::abs(p) == Catch::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(moments(make_standard("QPSK")).entropy_bits == Catch::Approx(2.0));
}

TEST_CASE("constellation construction validates its inputs") {
    const std::vector<cplx> pts{{1, 0}, {-1, 0}};
    REQUIRE_THROWS_AS(Constellation({{1, 0}}, {1.0}, "x"), InvalidArgument);
    REQUIRE_THROWS_AS(Constellation(pts, {0.7, 0.7}, "x"), InvalidArgument);
    REQUIRE_THROWS_AS(Constellation(pts, {1.2, -0.2}, "x"), InvalidArgument);
    REQUIRE_THROWS_AS(Constellation({{1, 0}, {1, 0}}, {0.5, 0.5}, "x"), InvalidArgument);
    REQUIRE_THROWS_AS(Constellation(pts, {1.0}, "x"), InvalidArgument);
    REQUIRE_THROWS_AS(make_standard("12QAM"), InvalidArgument);
    REQUIRE_THROWS_AS(make_standard("banana"), InvalidArgument);
    REQUIRE_NOTHROW(Constellation(pts, {0.25, 0.75}, "x"));
}

TEST_CASE("sampled symbol frequencies follow the probability vector") {
    const auto c = make_standard("QPSK", std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const std::size_t n = 200000;
    const CVector block = sample_block(c, n, 123);
    std::vector<std::size_t> counts(4, 0);
    for (Eigen::Index k = 0; k < block.size(); ++k)
        for (std::size_t i = 0; i < 4; ++i)
            if (block[k] == c.points()[i]) ++counts[i];
    // chi-square with 3 degrees of freedom, 99.9% point is 16.27
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double expected = c.probs()[i] * static_cast<double>(n);
        chi2 += std::pow(static_cast<double>(counts[i]) - expected, 2) / expected;
    }
    REQUIRE(chi2 < 16.27);
}

TEST_CASE("zero-probability points are never drawn") {
    const auto c = make_standard("QPSK", std::vector<double>{0.5, 0.0, 0.5, 0.0});
    const CVector block = sample_block(c, 10000, 5);
    for (Eigen::Index k = 0; k < block.size(); ++k) {
        REQUIRE(block[k] != c.points()[1]);
        REQUIRE(block[k] != c.points()[3]);
    }
}

TEST_CASE("matrix draws reuse the vector draw order") {
    const auto src = SymbolSource::from(make_standard("16QAM"));
    Rng a(9), b(9);
    const CMatrix m = src.draw(4, 6, a);
    const CVector v = src.draw(24, b);
    for (Eigen::Index c = 0; c < 6; ++c)
        for (Eigen::Index r = 0; r < 4; ++r) REQUIRE(m(r, c) == v[r + 4 * c]);
}

TEST_CASE("constellation JSON round trip is exact and strict") {
    const auto c = make_standard("16QAM", std::vector<double>(16, 1.0 / 16.0));
    nlohmann::json j;
    to_json(j, c);
    const auto back = constellation_from_json(j);
    REQUIRE(back.points() == c.points());
    REQUIRE(back.probs() == c.probs());
    REQUIRE(back.label() == "16QAM");
    j["extra"] = 1;
    REQUIRE_THROWS_AS(constellation_from_json(j), InvalidArgument);
}
