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

#include "isac/pcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "isac/parallel.hpp"

namespace isac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// -log sum_j p_j exp(-(|d_ij + n|^2 - |n|^2) / s2), the log-likelihood ratio
// of the sent point against the mixture.
double neg_log_mixture(const std::vector<cplx>& pts, const std::vector<double>& logp, std::size_t i, cplx n,
                       double s2, std::vector<double>& scratch) {
    const double base = std::norm(n);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (logp[j] == kNegInf) {
            scratch[j] = kNegInf;
            continue;
        }
        scratch[j] = logp[j] - (std::norm(pts[i] - pts[j] + n) - base) / s2;
    }
    return -log_sum_exp(scratch);
}

std::vector<double> log_probs(const std::vector<double>& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > 0.0 ? std::log(p[i]) : kNegInf;
    return out;
}

std::vector<double> divergences(const std::vector<cplx>& pts, const std::vector<double>& logp,
                                const NoiseQuadrature& q, double s2) {
    std::vector<double> d(pts.size(), 0.0), scratch(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) acc += q.weights[k] * neg_log_mixture(pts, logp, i, q.nodes[k], s2, scratch);
        d[i] = acc;
    }
    return d;
}

double mi_from(const std::vector<double>& logp, const std::vector<double>& d) {
    double mi = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (logp[i] != kNegInf) mi += std::exp(logp[i]) * d[i];
    return mi / std::log(2.0);
}

// Exponential tilt of the logits z by the two multipliers, normalized.
struct Tilt {
    const std::vector<double>& z;
    const std::vector<double>& a;  // |x|^2
    const std::vector<double>& b;  // |x|^4

    std::vector<double> logq(double l1, double l2) const {
        std::vector<double> out(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] == kNegInf ? kNegInf : z[i] - l1 * a[i] - l2 * b[i];
        const double norm = log_sum_exp(out);
        for (auto& v : out) v -= norm;
        return out;
    }
    static double moment(const std::vector<double>& logq, const std::vector<double>& w) {
        double m = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (logq[i] != kNegInf) m += std::exp(logq[i]) * w[i];
        return m;
    }

    // Multiplier on |x|^2 that makes the tilted power exactly 1; the power is
    // decreasing in l1.
    double power_multiplier(double l2) const {
        double lo = -1.0, hi = 1.0;
        while (moment(logq(lo, l2), a) < 1.0) {
            lo *= 2.0;
            if (lo < -1e15) throw Infeasible("unit power is not reachable on this alphabet");
        }
        while (moment(logq(hi, l2), a) > 1.0) {
            hi *= 2.0;
            if (hi > 1e15) throw Infeasible("unit power is not reachable on this alphabet");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (moment(logq(mid, l2), a) > 1.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

NoiseQuadrature gauss_hermite_noise(std::size_t order, double noise_variance) {
    if (order < 1) throw InvalidArgument("quadrature order must be positive");
    // Golub-Welsch on the Hermite Jacobi matrix (weight exp(-t^2))
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(order), static_cast<Eigen::Index>(order));
    for (std::size_t k = 1; k < order; ++k) {
        const double off = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
        jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const RVector t = eig.eigenvalues();
    RVector w(t.size());
    for (Eigen::Index k = 0; k < t.size(); ++k) w[k] = eig.eigenvectors()(0, k) * eig.eigenvectors()(0, k);  // sums to 1

    // Re, Im ~ N(0, s2 / 2) map to sigma * t per dimension
    const double sigma = std::sqrt(noise_variance);
    NoiseQuadrature q;
    for (Eigen::Index u = 0; u < t.size(); ++u)
        for (Eigen::Index v = 0; v < t.size(); ++v) {
            q.nodes.emplace_back(sigma * t[u], sigma * t[v]);
            q.weights.push_back(w[u] * w[v]);
        }
    return q;
}

std::vector<double> point_divergences(const Constellation& c, const NoiseQuadrature& q, double noise_variance) {
    return divergences(c.points(), log_probs(c.probs()), q, noise_variance);
}

double mutual_information(const Constellation& c, const AwgnChannel& ch, MiMethod method, std::size_t order_or_trials,
                          std::uint64_t seed) {
    if (!(ch.noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
    const auto logp = log_probs(c.probs());
    if (method == MiMethod::quadrature) {
        if (order_or_trials < 8) throw InvalidArgument("quadrature order must be at least 8");
        const auto q = gauss_hermite_noise(order_or_trials, ch.noise_variance);
        return mi_from(logp, divergences(c.points(), logp, q, ch.noise_variance));
    }

    if (order_or_trials < 10000) throw InvalidArgument("Monte-Carlo MI needs at least 1e4 samples");
    std::vector<double> cdf(c.size());
    std::partial_sum(c.probs().begin(), c.probs().end(), cdf.begin());
    constexpr std::size_t kBatch = 1000;
    const std::size_t batches = (order_or_trials + kBatch - 1) / kBatch;
    auto sums = run_trials(batches, seed, [&](Rng& rng, std::size_t b) {
        std::vector<double> scratch(c.size());
        const std::size_t count = std::min(kBatch, order_or_trials - b * kBatch);
        double acc = 0.0;
        for (std::size_t s = 0; s < count; ++s) {
            const double u = rng.uniform();
            std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), c.size() - 1);
            const cplx n = rng.complex_normal(ch.noise_variance);
            acc += neg_log_mixture(c.points(), logp, i, n, ch.noise_variance, scratch);
        }
        return acc;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    return total / static_cast<double>(order_or_trials) / std::log(2.0);
}

double min_kurtosis(const Constellation& c) {
    std::vector<double> a;
    for (const auto& p : c.points()) a.push_back(std::norm(p));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - 1.0) <= 1e-12) best = std::min(best, a[i] * a[i]);
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (!(a[i] < 1.0 && a[j] > 1.0)) continue;
            const double w = (a[j] - 1.0) / (a[j] - a[i]);
            best = std::min(best, w * a[i] * a[i] + (1.0 - w) * a[j] * a[j]);
        }
    }
    if (!std::isfinite(best)) throw Infeasible("unit power is not reachable on this alphabet");
    return best;
}

ShapingResult shape(const ShapingProblem& problem) {
    const Constellation& base = problem.base;
    const double cap = problem.kurtosis_cap;
    if (!(cap >= 1.0)) throw Infeasible("kurtosis below 1 infeasible");
    if (!(problem.channel.noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
    if (problem.quadrature_order < 8) throw InvalidArgument("quadrature order must be at least 8");

    const std::size_t m = base.size();
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = std::norm(base.points()[i]);
        b[i] = a[i] * a[i];
    }

    ShapingResult out;
    const double floor_kurt = min_kurtosis(base);
    out.cap_attainable = cap >= floor_kurt;
    out.effective_cap = cap < floor_kurt + kCapMargin ? std::max(cap, floor_kurt + kCapMargin) : cap;
    const double eff = out.effective_cap;

    const auto q = gauss_hermite_noise(problem.quadrature_order, problem.channel.noise_variance);
    const double s2 = problem.channel.noise_variance;

    std::vector<double> logp(m, -std::log(static_cast<double>(m)));
    std::vector<double> d = divergences(base.points(), logp, q, s2);

    for (std::size_t it = 0; it < problem.max_iters; ++it) {
        std::vector<double> z(m);
        for (std::size_t i = 0; i < m; ++i) z[i] = logp[i] == kNegInf ? kNegInf : logp[i] + d[i];
        const Tilt tilt{z, a, b};

        double l2 = 0.0;
        double l1 = tilt.power_multiplier(0.0);
        if (Tilt::moment(tilt.logq(l1, 0.0), b) > eff) {
            double lo = 0.0, hi = 1.0;
            while (Tilt::moment(tilt.logq(tilt.power_multiplier(hi), hi), b) > eff) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e15) throw Infeasible("kurtosis cap not reachable");
            }
            for (int k = 0; k < 100; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (Tilt::moment(tilt.logq(tilt.power_multiplier(mid), mid), b) > eff ? lo : hi) = mid;
            }
            l2 = hi;  // feasible end of the bracket
            l1 = tilt.power_multiplier(l2);
        }

        logp = tilt.logq(l1, l2);
        d = divergences(base.points(), logp, q, s2);
        const double mi = mi_from(logp, d);
        out.mi_history.push_back(mi);
        out.lambda_power = l1;
        out.lambda_kurtosis = l2;
        out.iterations = it + 1;
        if (it >= 1 && mi - out.mi_history[it - 1] < problem.tolerance) {
            out.converged = true;
            break;
        }
    }

    out.probs.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.probs[i] = logp[i] == kNegInf ? 0.0 : std::exp(logp[i]);
    const double total = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
    for (auto& p : out.probs) p /= total;
    out.mi_bits = out.mi_history.empty() ? 0.0 : out.mi_history.back();
    double p2 = 0.0, p4 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        p2 += out.probs[i] * a[i];
        p4 += out.probs[i] * b[i];
    }
    out.achieved_kurtosis = p4 / (p2 * p2);
    return out;
}

std::vector<FrontierPoint> tradeoff_frontier(const Constellation& base, const AwgnChannel& ch,
                                             const std::vector<double>& kappas, double tolerance,
                                             std::size_t max_iters, std::size_t quadrature_order) {
    if (kappas.empty()) throw InvalidArgument("frontier needs at least one kurtosis cap");
    if (!std::is_sorted(kappas.begin(), kappas.end())) throw InvalidArgument("kurtosis caps must be sorted ascending");
    if (kappas.front() < 1.0) throw Infeasible("kurtosis below 1 infeasible");
    std::vector<FrontierPoint> out;
    for (double k : kappas)
        out.push_back({k, shape(ShapingProblem{base, k, ch, tolerance, max_iters, quadrature_order})});
    return out;
}

}  // namespace isac
