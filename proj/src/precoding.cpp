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

#include "isac/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isac/parallel.hpp"

namespace isac {

namespace {

constexpr double kSingularRatio = 1e-10;

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
    return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

void check_rank(const Eigen::VectorXd& eig, const char* what) {
    const double top = eig.maxCoeff();
    if (!(top > 0.0) || eig.minCoeff() <= kSingularRatio * top) throw SingularMatrix(std::string(what) + " is rank deficient");
}

CMatrix inverse_pd(const CMatrix& m) {
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMatrix("matrix is not positive definite");
    return llt.solve(CMatrix::Identity(m.rows(), m.cols()));
}

CMatrix project_power_ball(const CMatrix& w, double power) {
    const double p = w.squaredNorm();
    return p > power ? CMatrix(w * std::sqrt(power / p)) : w;
}

// d rate / d conj(W)
CMatrix rate_gradient(const CMatrix& w, const CommLink& link) {
    const auto n = link.channel.rows();
    const CMatrix hw = link.channel * w;
    const CMatrix inner = link.noise_var * CMatrix::Identity(n, n) + hw * hw.adjoint();
    return link.channel.adjoint() * inverse_pd(inner) * hw / std::log(2.0);
}

// d/d conj(W) of the sample-average error
CMatrix sample_average_gradient(const CMatrix& w, const std::vector<CMatrix>& grams, const TirModel& model,
                                ErrorMetric metric) {
    CMatrix g = CMatrix::Zero(w.rows(), w.cols());
    const auto n = w.rows();
    for (const auto& a : grams) {
        const CMatrix wa = w * a;
        const CMatrix m = wa * w.adjoint();
        CMatrix k;
        if (metric == ErrorMetric::LSE) {
            k = inverse_pd(m);
        } else {
            k = inverse_pd(CMatrix::Identity(n, n) / *model.prior_var + m / model.noise_var);
        }
        g.noalias() += k * k * wa;
    }
    const double scale = metric == ErrorMetric::LSE ? model.noise_var * static_cast<double>(model.n_rx)
                                                    : static_cast<double>(model.n_rx) / model.noise_var;
    return -scale / static_cast<double>(grams.size()) * g;
}

}  // namespace

void TirModel::validate() const {
    if (n_tx < 1) throw InvalidArgument("n_tx must be at least 1");
    if (n_rx < 1) throw InvalidArgument("n_rx must be at least 1");
    if (frame_len < 1) throw InvalidArgument("frame length must be at least 1");
    if (!(noise_var >= 0.0)) throw InvalidArgument("noise variance must be nonnegative");
    if (prior_var && !(*prior_var > 0.0)) throw InvalidArgument("prior variance must be positive");
}

bool PrecodedFrame::within_budget() const {
    return transmit().squaredNorm() <= power_budget * static_cast<double>(symbols.cols()) + 1e-6;
}

std::string to_string(ErrorMetric metric) { return metric == ErrorMetric::LSE ? "LSE" : "LMMSE"; }

ErrorMetric parse_error_metric(std::string_view name) {
    if (name == "LSE") return ErrorMetric::LSE;
    if (name == "LMMSE") return ErrorMetric::LMMSE;
    throw InvalidArgument("unknown error metric '" + std::string(name) + "'");
}

double lse_error(const CMatrix& x, const TirModel& model) {
    if (static_cast<std::size_t>(x.rows()) != model.n_tx) throw InvalidArgument("transmit block must have n_tx rows");
    const Eigen::VectorXd eig = hermitian_eigenvalues(x * x.adjoint());
    check_rank(eig, "X X^H");
    if (model.noise_var == 0.0) return 0.0;
    return model.noise_var * static_cast<double>(model.n_rx) * eig.cwiseInverse().sum();
}

double lse_error(const PrecodedFrame& frame, const TirModel& model) { return lse_error(frame.transmit(), model); }

double lmmse_error(const CMatrix& x, const TirModel& model) {
    if (!model.prior_var) throw InvalidArgument("LMMSE needs a prior variance");
    if (static_cast<std::size_t>(x.rows()) != model.n_tx) throw InvalidArgument("transmit block must have n_tx rows");
    const double gamma = *model.prior_var;
    const double s2 = model.noise_var;
    const Eigen::VectorXd eig = hermitian_eigenvalues(x * x.adjoint()).cwiseMax(0.0);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        if (s2 == 0.0)
            sum += eig[k] > 0.0 ? 0.0 : gamma;
        else
            sum += gamma * s2 / (s2 + gamma * eig[k]);
    }
    return static_cast<double>(model.n_rx) * sum;
}

double lmmse_error(const PrecodedFrame& frame, const TirModel& model) { return lmmse_error(frame.transmit(), model); }

double instantaneous_error(const CMatrix& x, const TirModel& model, ErrorMetric metric) {
    return metric == ErrorMetric::LSE ? lse_error(x, model) : lmmse_error(x, model);
}

ErgodicStats ergodic_error(const CMatrix& precoder, const TirModel& model, const SymbolSource& source,
                           ErrorMetric metric, std::size_t trials, std::uint64_t seed, double threshold) {
    model.validate();
    if (trials < 100) throw InvalidArgument("ergodic error needs at least 100 trials");
    if (static_cast<std::size_t>(precoder.rows()) != model.n_tx) throw InvalidArgument("precoder must have n_tx rows");
    const auto n_s = static_cast<std::size_t>(precoder.cols());

    auto samples = run_trials(trials, seed, [&](Rng& rng, std::size_t) -> std::optional<double> {
        const CMatrix s = source.draw(n_s, model.frame_len, rng);
        try {
            return instantaneous_error(precoder * s, model, metric);
        } catch (const SingularMatrix&) {
            return std::nullopt;
        }
    });

    ErgodicStats out;
    std::vector<double> values;
    values.reserve(trials);
    for (const auto& v : samples) {
        if (v)
            values.push_back(*v);
        else
            ++out.singular_frames;
    }
    if (values.empty()) throw SingularMatrix("every sampled frame is singular");
    out.stats = summarize(values, threshold, seed);
    return out;
}

CMatrix ddp_precoder(const CMatrix& symbols, double power, std::size_t n_tx) {
    if (static_cast<std::size_t>(symbols.rows()) != n_tx) throw InvalidArgument("DDP expects n_tx symbol streams");
    if (!(power > 0.0)) throw InvalidArgument("power must be positive");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(symbols * symbols.adjoint());
    check_rank(eig.eigenvalues(), "S S^H");
    const double scale = std::sqrt(power * static_cast<double>(symbols.cols()) / static_cast<double>(n_tx));
    const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return scale * eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
}

double comm_rate(const CMatrix& precoder, const CommLink& link) {
    if (!(link.noise_var > 0.0)) throw InvalidArgument("link noise variance must be positive");
    if (link.channel.cols() != precoder.rows()) throw InvalidArgument("channel and precoder dimensions disagree");
    const CMatrix hw = link.channel * precoder;
    const Eigen::VectorXd eig = hermitian_eigenvalues(hw * hw.adjoint() / link.noise_var).cwiseMax(0.0);
    double rate = 0.0;
    for (Eigen::Index k = 0; k < eig.size(); ++k) rate += std::log2(1.0 + eig[k]);
    return rate;
}

double link_capacity(const CommLink& link, double power) {
    if (!(link.noise_var > 0.0)) throw InvalidArgument("link noise variance must be positive");
    Eigen::VectorXd gains = hermitian_eigenvalues(link.channel.adjoint() * link.channel / link.noise_var);
    std::vector<double> g;
    for (Eigen::Index k = 0; k < gains.size(); ++k)
        if (gains[k] > 1e-12 * std::max(1.0, gains.maxCoeff())) g.push_back(gains[k]);
    std::sort(g.begin(), g.end(), std::greater<>());
    // water level over the strongest `active` eigenmodes
    for (std::size_t active = g.size(); active >= 1; --active) {
        double inv_sum = 0.0;
        for (std::size_t k = 0; k < active; ++k) inv_sum += 1.0 / g[k];
        const double level = (power + inv_sum) / static_cast<double>(active);
        if (level - 1.0 / g[active - 1] <= 0.0) continue;
        double cap = 0.0;
        for (std::size_t k = 0; k < active; ++k) cap += std::log2(level * g[k]);
        return cap;
    }
    return 0.0;
}

std::vector<CMatrix> frozen_grams(const SymbolSource& source, std::size_t n_s, std::size_t frame_len,
                                  std::size_t count, std::uint64_t seed) {
    return run_trials(count, seed, [&](Rng& rng, std::size_t) -> CMatrix {
        const CMatrix s = source.draw(n_s, frame_len, rng);
        return s * s.adjoint();
    });
}

double sample_average_error(const CMatrix& precoder, const std::vector<CMatrix>& grams, const TirModel& model,
                            ErrorMetric metric) {
    double sum = 0.0;
    const auto n = precoder.rows();
    for (const auto& a : grams) {
        const CMatrix m = precoder * a * precoder.adjoint();
        if (metric == ErrorMetric::LSE) {
            const Eigen::VectorXd eig = hermitian_eigenvalues(m);
            const double top = eig.maxCoeff();
            if (!(top > 0.0) || eig.minCoeff() <= kSingularRatio * top) return std::numeric_limits<double>::infinity();
            sum += model.noise_var * static_cast<double>(model.n_rx) * eig.cwiseInverse().sum();
        } else {
            const CMatrix k = CMatrix::Identity(n, n) / *model.prior_var + m / model.noise_var;
            sum += static_cast<double>(model.n_rx) * inverse_pd(k).trace().real();
        }
    }
    return sum / static_cast<double>(grams.size());
}

DipResult dip_precoder(const TirModel& model, const SymbolSource& source, double power, ErrorMetric metric,
                       const std::optional<CommLink>& comm, const DipOptions& options) {
    model.validate();
    if (options.sa_trials < 100) throw InvalidArgument("DIP needs at least 100 sample-average trials");
    if (!(power > 0.0)) throw InvalidArgument("power must be positive");
    if (metric == ErrorMetric::LMMSE && !model.prior_var) throw InvalidArgument("LMMSE needs a prior variance");
    if (metric == ErrorMetric::LMMSE && !(model.noise_var > 0.0))
        throw InvalidArgument("LMMSE design needs positive noise variance");

    const bool constrained = comm && comm->rate_floor > 0.0;
    if (comm) {
        const double cap = link_capacity(*comm, power);
        if (comm->rate_floor > cap + 1e-9)
            throw Infeasible("rate floor " + std::to_string(comm->rate_floor) + " exceeds link capacity " +
                                 std::to_string(cap),
                             cap);
    }

    const auto n = static_cast<Eigen::Index>(model.n_tx);
    const auto grams = frozen_grams(source, model.n_tx, model.frame_len, options.sa_trials,
                                    derive_seed(options.seed, "dip-samples", 0));

    CMatrix w;
    if (options.start_from_identity) {
        w = std::sqrt(power / static_cast<double>(model.n_tx)) * CMatrix::Identity(n, n);
    } else {
        Rng rng(derive_seed(options.seed, "dip-start", 0));
        w.resize(n, n);
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r) w(r, c) = rng.complex_normal();
        w *= std::sqrt(power / w.squaredNorm());
    }

    const double start_value = sample_average_error(w, grams, model, metric);
    if (!std::isfinite(start_value)) throw SingularMatrix("DIP starting point is singular");
    const double scale = start_value;
    const double target = constrained ? std::min(comm->rate_floor + 1e-4, link_capacity(*comm, power)) : 0.0;
    auto feasible = [&](double rate) { return !constrained || rate >= comm->rate_floor - 5e-4; };

    DipResult out;
    std::optional<std::pair<double, CMatrix>> best;
    auto consider = [&](const CMatrix& cand, double sensing) {
        const double rate = comm ? comm_rate(cand, *comm) : 0.0;
        if (feasible(rate) && (!best || sensing < best->first)) best = std::make_pair(sensing, cand);
    };

    const std::vector<double> weights = constrained ? std::vector<double>{1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6}
                                                    : std::vector<double>{0.0};
    double sensing = start_value;
    out.objective_history.push_back(sensing);
    consider(w, sensing);

    for (double rho : weights) {
        auto total = [&](const CMatrix& cand, double sens) {
            if (!constrained) return sens / scale;
            const double gap = std::max(0.0, target - comm_rate(cand, *comm));
            return sens / scale + rho * gap * gap;
        };
        double current = total(w, sensing);
        double step = -1.0;
        for (std::size_t it = 0; it < options.iters; ++it) {
            CMatrix grad = sample_average_gradient(w, grams, model, metric) / scale;
            if (constrained) {
                const double gap = std::max(0.0, target - comm_rate(w, *comm));
                if (gap > 0.0) grad -= 2.0 * rho * gap * rate_gradient(w, *comm);
            }
            const double gnorm = grad.norm();
            if (gnorm == 0.0) break;
            if (step < 0.0) step = 0.1 * w.norm() / gnorm;

            bool accepted = false;
            CMatrix cand;
            double cand_sensing = 0.0, cand_total = 0.0;
            for (int halving = 0; halving < 60; ++halving) {
                cand = project_power_ball(w - step * grad, power);
                cand_sensing = sample_average_error(cand, grams, model, metric);
                cand_total = total(cand, cand_sensing);
                if (std::isfinite(cand_total) && cand_total < current) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            ++out.iterations;
            if (!accepted) break;
            const double decrease = current - cand_total;
            w = cand;
            sensing = cand_sensing;
            current = cand_total;
            out.objective_history.push_back(sensing);
            consider(w, sensing);
            step *= 1.5;
            if (decrease <= 1e-12 * std::abs(current)) break;
        }
    }

    if (!best) throw NotConverged("DIP found no precoder meeting the rate floor");
    out.precoder = best->second;
    out.objective = best->first;
    out.rate = comm ? comm_rate(out.precoder, *comm) : 0.0;
    return out;
}

}  // namespace isac
