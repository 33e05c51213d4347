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

#include <cstdlib>
#include <set>
#include <stdexcept>

#include "isac/parallel.hpp"
#include "isac/random.hpp"

using namespace isac;

namespace {

// Restores ISAC_THREADS when a test changes it.
struct ThreadsEnv {
    explicit ThreadsEnv(const char* value) {
        if (const char* old = std::getenv("ISAC_THREADS")) saved = old;
        setenv("ISAC_THREADS", value, 1);
    }
    ~ThreadsEnv() {
        if (saved.empty())
            unsetenv("ISAC_THREADS");
        else
            setenv("ISAC_THREADS", saved.c_str(), 1);
    }
    std::string saved;
};

}  // namespace

TEST_CASE("Rng streams repeat for equal seeds and differ otherwise") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        REQUIRE(x == b.next_u64());
        differs = differs || x != c.next_u64();
    }
    REQUIRE(differs);
}

TEST_CASE("uniform draws stay in [0, 1) with the right mean") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(sum / n == Catch::Approx(0.5).margin(5.0 * std::sqrt(1.0 / 12.0 / n)));
}

TEST_CASE("complex normal draws have the requested variance and circular symmetry") {
    Rng rng(11);
    const int n = 200000;
    const double var = 2.5;
    double power = 0.0;
    cplx pseudo{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const cplx z = rng.complex_normal(var);
        power += std::norm(z);
        pseudo += z * z;
    }
    // E|z|^4 = 2 var^2 gives the standard error of the power estimate
    REQUIRE(power / n == Catch::Approx(var).margin(5.0 * var / std::sqrt(n)));
    REQUIRE(std::abs(pseudo) / n < 5.0 * var / std::sqrt(n));
}

TEST_CASE("derived seeds are distinct across indices and names") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seen.insert(derive_seed(1, i));
        seen.insert(derive_seed(1, "alpha", i));
        seen.insert(derive_seed(1, "beta", i));
    }
    REQUIRE(seen.size() == 3000);
    REQUIRE(derive_seed(5, "alpha", 3) == derive_seed(5, "alpha", 3));
    REQUIRE(derive_seed(5, "alpha", 3) != derive_seed(6, "alpha", 3));
}

TEST_CASE("run_trials results do not depend on the worker count") {
    auto draw = [](Rng& rng, std::size_t i) { return rng.uniform() + static_cast<double>(i); };
    std::vector<double> serial, pooled;
    {
        ThreadsEnv env("1");
        serial = run_trials(1001, 99, draw);
    }
    {
        ThreadsEnv env("4");
        pooled = run_trials(1001, 99, draw);
    }
    REQUIRE(serial == pooled);
    // trial i sees the stream derived from (seed, i)
    Rng expected(derive_seed(99, 500));
    REQUIRE(serial[500] == expected.uniform() + 500.0);
}

TEST_CASE("run_trials rethrows the failure of the earliest chunk") {
    ThreadsEnv env("4");
    auto failing = [](Rng&, std::size_t i) -> int {
        if (i == 10) throw std::runtime_error("first");
        if (i == 90) throw std::runtime_error("second");
        return 0;
    };
    for (int rep = 0; rep < 5; ++rep) REQUIRE_THROWS_WITH(run_trials(100, 1, failing), "first");
}
