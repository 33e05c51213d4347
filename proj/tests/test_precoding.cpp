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

#include "isac/constellation.hpp"
#include "isac/precoding.hpp"
#include "isac/random.hpp"

using namespace isac;

namespace {

CMatrix gaussian_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double var = 1.0) {
    CMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.complex_normal(var);
    return m;
}

// Simulates least-squares channel estimation on a fixed pilot block.
double simulated_ls_error(const CMatrix& x, std::size_t n_rx, double noise_var, int reps, Rng& rng) {
    const CMatrix gram_inv = (x * x.adjoint()).inverse();
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        const CMatrix h = gaussian_matrix(static_cast<Eigen::Index>(n_rx), x.rows(), rng);
        const CMatrix y = h * x + gaussian_matrix(static_cast<Eigen::Index>(n_rx), x.cols(), rng, noise_var);
        const CMatrix est = y * x.adjoint() * gram_inv;
        acc += (est - h).squaredNorm();
    }
    return acc / reps;
}

}  // namespace

TEST_CASE("LSE matches a simulated least-squares estimator") {
    Rng rng(1);
    TirModel m;
    m.n_tx = 4;
    m.n_rx = 3;
    m.noise_var = 0.5;
    const CMatrix x = gaussian_matrix(4, 10, rng);
    const double sim = simulated_ls_error(x, 3, 0.5, 40000, rng);
    REQUIRE(lse_error(x, m) == Catch::Approx(sim).epsilon(0.02));
    REQUIRE(lse_error(x, m) == Catch::Approx(0.5 * 3 * (x * x.adjoint()).inverse().trace().real()).epsilon(1e-10));
}

TEST_CASE("LMMSE follows its matrix formula and approaches LSE for a flat prior") {
    Rng rng(2);
    TirModel m;
    m.n_tx = 4;
    m.n_rx = 2;
    m.noise_var = 0.7;
    m.prior_var = 1.5;
    const CMatrix x = gaussian_matrix(4, 12, rng);
    const CMatrix k = CMatrix::Identity(4, 4) / 1.5 + x * x.adjoint() / 0.7;
    REQUIRE(lmmse_error(x, m) == Catch::Approx(2.0 * k.inverse().trace().real()).epsilon(1e-10));
    REQUIRE(lmmse_error(x, m) < lse_error(x, m));
    m.prior_var = 1e9;
    REQUIRE(lmmse_error(x, m) == Catch::Approx(lse_error(x, m)).epsilon(1e-6));
    m.prior_var.reset();
    REQUIRE_THROWS_AS(lmmse_error(x, m), InvalidArgument);
}

TEST_CASE("rank-deficient pilots are singular for LSE but fine for LMMSE") {
    Rng rng(3);
    TirModel m;
    m.n_tx = 4;
    m.prior_var = 1.0;
    const CMatrix x = gaussian_matrix(4, 3, rng);
    REQUIRE_THROWS_AS(lse_error(x, m), SingularMatrix);
    REQUIRE(std::isfinite(lmmse_error(x, m)));
    m.frame_len = 3;
    REQUIRE_THROWS_AS(ergodic_error(CMatrix::Identity(4, 4), m, SymbolSource::gaussian(), ErrorMetric::LSE, 100, 1),
                      SingularMatrix);
}

TEST_CASE("ergodic LSE under Gaussian symbols matches the inverse-Wishart mean") {
    TirModel m;
    m.n_tx = 4;
    m.n_rx = 4;
    m.noise_var = 1.0;
    m.frame_len = 16;
    const double p = 4.0;
    const CMatrix w = std::sqrt(p / 4.0) * CMatrix::Identity(4, 4);
    const auto s = ergodic_error(w, m, SymbolSource::gaussian(), ErrorMetric::LSE, 20000, 5);
    // E tr((S S^H)^-1) = n_tx / (L - n_tx) for an n_tx x L standard complex Gaussian S
    const double closed = 1.0 * 4 * (4.0 / p) * 4.0 / (16.0 - 4.0);
    REQUIRE(s.stats.mean == Catch::Approx(closed).epsilon(0.02));
    REQUIRE(s.singular_frames == 0);
}

TEST_CASE("data-dependent precoder whitens every frame") {
    Rng rng(4);
    TirModel m;
    m.n_tx = 6;
    m.n_rx = 5;
    m.noise_var = 0.8;
    m.frame_len = 20;
    const double p = 3.0;
    const auto src = SymbolSource::from(make_standard("16QAM"));
    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix s = src.draw(6, 20, rng);
        const PrecodedFrame f{ddp_precoder(s, p, 6), s, p};
        const CMatrix x = f.transmit();
        REQUIRE((x * x.adjoint() - (p * 20.0 / 6.0) * CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE(f.within_budget());
        REQUIRE(lse_error(f, m) == Catch::Approx(0.8 * 5 * 36.0 / (p * 20.0)).epsilon(1e-12));
    }
}

TEST_CASE("rate and capacity agree with direct computations") {
    Rng rng(5);
    const CMatrix h = gaussian_matrix(3, 5, rng);
    const CommLink link{h, 0.5, 0.0};
    const CMatrix w = gaussian_matrix(5, 5, rng);
    const CMatrix inner = CMatrix::Identity(3, 3) + h * w * w.adjoint() * h.adjoint() / 0.5;
    REQUIRE(comm_rate(w, link) == Catch::Approx(std::log2(inner.determinant().real())).epsilon(1e-10));

    // two eigenmodes: grid search over the power split
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const CommLink diag{d, 1.0, 0.0};
    const double power = 1.3;
    double best = 0.0;
    for (int k = 0; k <= 100000; ++k) {
        const double p1 = power * k / 100000.0;
        best = std::max(best, std::log2(1.0 + 4.0 * p1) + std::log2(1.0 + 0.25 * (power - p1)));
    }
    REQUIRE(link_capacity(diag, power) == Catch::Approx(best).epsilon(1e-7));
    // any precoder within the budget stays below capacity
    const CMatrix wn = w * std::sqrt(power / w.squaredNorm());
    REQUIRE(comm_rate(wn.topLeftCorner(2, 2) * std::sqrt(power / wn.topLeftCorner(2, 2).squaredNorm()), diag) <=
            link_capacity(diag, power) + 1e-12);
}

TEST_CASE("DIP descends on its sample set and beats the identity there") {
    TirModel m;
    m.n_tx = 4;
    m.n_rx = 4;
    m.frame_len = 8;
    const auto src = SymbolSource::from(make_standard("16QAM"));
    DipOptions opt;
    opt.sa_trials = 200;
    opt.iters = 200;
    opt.seed = 9;
    const auto r = dip_precoder(m, src, 4.0, ErrorMetric::LSE, std::nullopt, opt);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
        REQUIRE(r.objective_history[i] <= r.objective_history[i - 1]);
    REQUIRE(r.precoder.squaredNorm() <= 4.0 + 1e-9);
    const auto grams = frozen_grams(src, 4, 8, 200, derive_seed(9, "dip-samples", 0));
    REQUIRE(r.objective == Catch::Approx(sample_average_error(r.precoder, grams, m, ErrorMetric::LSE)));
    REQUIRE(r.objective <= sample_average_error(CMatrix::Identity(4, 4), grams, m, ErrorMetric::LSE));
}

TEST_CASE("rate-constrained DIP meets its floor or reports the capacity") {
    Rng rng(10);
    TirModel m;
    m.n_tx = 4;
    m.n_rx = 4;
    m.frame_len = 8;
    CommLink link{gaussian_matrix(2, 4, rng), 1.0, 0.0};
    const double power = 4.0;
    const double cap = link_capacity(link, power);
    const double base_rate = comm_rate(CMatrix::Identity(4, 4), link);
    DipOptions opt;
    opt.sa_trials = 100;
    opt.iters = 100;
    opt.seed = 2;

    link.rate_floor = base_rate + 0.5 * (cap - base_rate);
    const auto r = dip_precoder(m, SymbolSource::gaussian(), power, ErrorMetric::LSE, link, opt);
    REQUIRE(r.rate >= link.rate_floor - 1e-3);
    REQUIRE(r.rate == Catch::Approx(comm_rate(r.precoder, link)));

    link.rate_floor = cap + 0.5;
    try {
        dip_precoder(m, SymbolSource::gaussian(), power, ErrorMetric::LSE, link, opt);
        FAIL("expected infeasibility");
    } catch (const Infeasible& e) {
        REQUIRE(e.achieved().value() == Catch::Approx(cap));
    }
}

TEST_CASE("a zero rate floor reproduces the unconstrained design") {
    Rng rng(11);
    TirModel m;
    m.n_tx = 3;
    m.frame_len = 6;
    DipOptions opt;
    opt.sa_trials = 100;
    opt.iters = 50;
    const CommLink link{gaussian_matrix(2, 3, rng), 1.0, 0.0};
    const auto a = dip_precoder(m, SymbolSource::gaussian(), 3.0, ErrorMetric::LSE, link, opt);
    const auto b = dip_precoder(m, SymbolSource::gaussian(), 3.0, ErrorMetric::LSE, std::nullopt, opt);
    REQUIRE((a.precoder - b.precoder).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LMMSE design runs and stays within the power budget") {
    TirModel m;
    m.n_tx = 4;
    m.frame_len = 8;
    m.prior_var = 1.0;
    DipOptions opt;
    opt.sa_trials = 100;
    opt.iters = 50;
    const auto r = dip_precoder(m, SymbolSource::gaussian(), 2.0, ErrorMetric::LMMSE, std::nullopt, opt);
    REQUIRE(r.precoder.squaredNorm() <= 2.0 + 1e-9);
    m.prior_var.reset();
    REQUIRE_THROWS_AS(dip_precoder(m, SymbolSource::gaussian(), 2.0, ErrorMetric::LMMSE, std::nullopt, opt), InvalidArgument);
}

TEST_CASE("metric names parse") {
    REQUIRE(parse_error_metric("LSE") == ErrorMetric::LSE);
    REQUIRE(to_string(ErrorMetric::LMMSE) == "LMMSE");
    REQUIRE_THROWS_AS(parse_error_metric("MSE"), InvalidArgument);
}
