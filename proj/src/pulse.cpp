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

#include "isac/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace isac {

namespace {

constexpr double kGridEps = 1e-9;

void check_grid(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span) {
    if (!(symbol_period > 0.0) || !std::isfinite(symbol_period)) throw InvalidArgument("symbol period must be positive");
    if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw InvalidArgument("rolloff must lie in [0, 1]");
    if (oversampling < 4) throw InvalidArgument("oversampling must be at least 4");
    if (span < 8 || span % 2 != 0) throw InvalidArgument("span must be an even number of symbols, at least 8");
}

std::size_t band_edge_index(double rolloff, std::size_t span) {
    return static_cast<std::size_t>(std::floor((1.0 + rolloff) * static_cast<double>(span) / 2.0 + kGridEps));
}

// Raised-cosine G / T at normalized frequency f T.
double raised_cosine(double f, double rolloff) {
    f = std::abs(f);
    const double lo = (1.0 - rolloff) / 2.0;
    const double hi = (1.0 + rolloff) / 2.0;
    if (rolloff == 0.0) {
        if (f < 0.5 - kGridEps) return 1.0;
        return std::abs(f - 0.5) <= kGridEps ? 0.5 : 0.0;
    }
    if (f <= lo + kGridEps) return 1.0;
    if (f >= hi - kGridEps) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi / rolloff * (f - lo)));
}

// Rows: g(n / K) for the listed lags n (time in units of T), columns: u_i.
Eigen::MatrixXd acf_operator(const std::vector<long>& lags, std::size_t half_band, std::size_t oversampling,
                             std::size_t span) {
    Eigen::MatrixXd b(static_cast<Eigen::Index>(lags.size()), static_cast<Eigen::Index>(half_band + 1));
    const double period = static_cast<double>(oversampling * span);
    for (std::size_t r = 0; r < lags.size(); ++r)
        for (std::size_t i = 0; i <= half_band; ++i) {
            const double w = (i == 0) ? 1.0 : 2.0;
            b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                w * std::cos(2.0 * kPi * static_cast<double>(i) * static_cast<double>(lags[r]) / period) /
                static_cast<double>(span);
        }
    return b;
}

std::vector<long> region_lags(const PulseSpec& p, double tau_begin, double tau_end) {
    const double step = p.symbol_period / static_cast<double>(p.oversampling);
    const long first = static_cast<long>(std::ceil(tau_begin / step - kGridEps));
    const long last = std::min(static_cast<long>(std::floor(tau_end / step + kGridEps)),
                               static_cast<long>(p.oversampling * p.span / 2));
    std::vector<long> lags;
    for (long n = std::max(first, 0L); n <= last; ++n) lags.push_back(n);
    return lags;
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace

RVector PulseSpec::half_spectrum() const {
    const auto half = static_cast<Eigen::Index>(half_band());
    return spectrum.segment(half, half + 1) / symbol_period;
}

PulseSpec pulse_from_half_spectrum(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span,
                                   const RVector& half) {
    check_grid(symbol_period, rolloff, oversampling, span);
    const std::size_t band = band_edge_index(rolloff, span);
    if (static_cast<std::size_t>(half.size()) != band + 1)
        throw InvalidArgument("half spectrum needs " + std::to_string(band + 1) + " samples");

    PulseSpec p;
    p.symbol_period = symbol_period;
    p.rolloff = rolloff;
    p.oversampling = oversampling;
    p.span = span;

    const auto nf = static_cast<Eigen::Index>(2 * band + 1);
    p.freq.resize(nf);
    p.spectrum.resize(nf);
    RVector root(static_cast<Eigen::Index>(band + 1));
    for (std::size_t i = 0; i <= band; ++i) root[static_cast<Eigen::Index>(i)] = std::sqrt(std::max(0.0, half[static_cast<Eigen::Index>(i)]));
    for (Eigen::Index k = 0; k < nf; ++k) {
        const long i = static_cast<long>(k) - static_cast<long>(band);
        p.freq[k] = static_cast<double>(i) / (static_cast<double>(span) * symbol_period);
        p.spectrum[k] = std::max(0.0, half[std::abs(i)]) * symbol_period;
    }

    const std::size_t length = oversampling * span;
    const double period = static_cast<double>(length);
    p.taps.resize(static_cast<Eigen::Index>(length));
    for (std::size_t k = 0; k < length; ++k) {
        const long n = static_cast<long>(k) - static_cast<long>(length / 2);
        double acc = root[0];
        for (std::size_t i = 1; i <= band; ++i)
            acc += 2.0 * root[static_cast<Eigen::Index>(i)] *
                   std::cos(2.0 * kPi * static_cast<double>(i) * static_cast<double>(n) / period);
        p.taps[static_cast<Eigen::Index>(k)] = acc / static_cast<double>(span);
    }
    return p;
}

PulseSpec rrc_pulse(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span) {
    check_grid(symbol_period, rolloff, oversampling, span);
    const std::size_t band = band_edge_index(rolloff, span);
    RVector half(static_cast<Eigen::Index>(band + 1));
    for (std::size_t i = 0; i <= band; ++i)
        half[static_cast<Eigen::Index>(i)] = raised_cosine(static_cast<double>(i) / static_cast<double>(span), rolloff);
    return pulse_from_half_spectrum(symbol_period, rolloff, oversampling, span, half);
}

PulseAcf pulse_acf(const PulseSpec& p) {
    const long half_len = static_cast<long>(p.oversampling * p.span / 2);
    std::vector<long> lags;
    for (long n = -half_len; n <= half_len; ++n) lags.push_back(n);
    const Eigen::MatrixXd op = acf_operator(lags, p.half_band(), p.oversampling, p.span);
    PulseAcf out;
    out.g = op * p.half_spectrum();
    out.tau.resize(static_cast<Eigen::Index>(lags.size()));
    const double step = p.symbol_period / static_cast<double>(p.oversampling);
    for (std::size_t k = 0; k < lags.size(); ++k) out.tau[static_cast<Eigen::Index>(k)] = static_cast<double>(lags[k]) * step;
    return out;
}

RegionIslr region_islr(const PulseSpec& p, double tau_begin, double tau_end) {
    if (!(tau_end > tau_begin) || tau_begin < 0.0) throw InvalidArgument("delay region must satisfy 0 <= begin < end");
    const auto lags = region_lags(p, tau_begin, tau_end);
    if (lags.empty()) throw InvalidArgument("delay region contains no grid delays");
    const PulseAcf acf = pulse_acf(p);
    const double peak = acf.at(0);
    double sum = 0.0;
    for (long n : lags) sum += acf.at(n) * acf.at(n);
    return RegionIslr{tau_begin, tau_end, to_db(sum / (peak * peak))};
}

double nyquist_defect(const PulseSpec& p, std::size_t kmax) {
    const PulseAcf acf = pulse_acf(p);
    const long limit = static_cast<long>(std::min(kmax, p.span / 2));
    const long k_step = static_cast<long>(p.oversampling);
    double worst = 0.0;
    for (long k = 1; k <= limit; ++k) {
        worst = std::max(worst, std::abs(acf.at(k * k_step)) / acf.at(0));
        worst = std::max(worst, std::abs(acf.at(-k * k_step)) / acf.at(0));
    }
    return worst;
}

double folded_spectrum_defect(const PulseSpec& p) {
    const long band = static_cast<long>(p.half_band());
    const long span = static_cast<long>(p.span);
    std::vector<double> folded(p.span, 0.0);
    for (long i = -band; i <= band; ++i) {
        const long r = ((i % span) + span) % span;
        folded[static_cast<std::size_t>(r)] += p.spectrum[i + band] / p.symbol_period;
    }
    double worst = 0.0;
    for (double v : folded) worst = std::max(worst, std::abs(v - 1.0));
    return worst;
}

CVector shape_signal(const CVector& symbols, const PulseSpec& pulse) {
    const auto k = static_cast<Eigen::Index>(pulse.oversampling);
    const Eigen::Index length = symbols.size() * k;
    const Eigen::Index taps = pulse.taps.size();
    if (length < taps) throw InvalidArgument("block shorter than the pulse span");
    const Eigen::Index center = static_cast<Eigen::Index>(pulse.center_tap());
    CVector out = CVector::Zero(length);
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        const cplx x = symbols[s];
        if (x == cplx(0.0)) continue;
        for (Eigen::Index t = 0; t < taps; ++t) {
            const Eigen::Index pos = ((s * k + t - center) % length + length) % length;
            out[pos] += x * pulse.taps[t];
        }
    }
    return out;
}

AffineNonnegProjector::AffineNonnegProjector(Eigen::MatrixXd a, RVector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size()) throw InvalidArgument("constraint matrix and right-hand side disagree");
    pinv_ = a_.completeOrthogonalDecomposition().pseudoInverse();
}

RVector AffineNonnegProjector::project_affine(const RVector& v) const { return v - pinv_ * (a_ * v - b_); }

RVector AffineNonnegProjector::project(const RVector& v, double tol, std::size_t max_iters) const {
    RVector x = v;
    RVector p = RVector::Zero(v.size());
    RVector q = RVector::Zero(v.size());
    for (std::size_t it = 0; it < max_iters; ++it) {
        const RVector y = project_affine(x + p);
        p = x + p - y;
        const RVector next = (y + q).cwiseMax(0.0);
        q = y + q - next;
        const double step = (next - x).cwiseAbs().maxCoeff();
        x = next;
        if (step <= tol && affine_residual(x) <= 1e-12) return x;
    }
    if (affine_residual(x) > 1e-8) throw Infeasible("affine and nonnegativity constraints do not intersect");
    return x;
}

AffineNonnegProjector nyquist_constraints(double rolloff, std::size_t span) {
    const std::size_t band = band_edge_index(rolloff, span);
    const long s = static_cast<long>(span);
    const std::size_t rows = span / 2 + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(band + 1));
    for (long i = -static_cast<long>(band); i <= static_cast<long>(band); ++i) {
        const long r = ((i % s) + s) % s;
        if (r > s / 2) continue;  // residue s - r carries the mirrored equation
        a(r, std::abs(i)) += 1.0;
    }
    return AffineNonnegProjector(std::move(a), RVector::Ones(static_cast<Eigen::Index>(rows)));
}

PulseDesign design_pulse(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span,
                         double tau_begin, double tau_end, std::size_t max_iters, double tol) {
    check_grid(symbol_period, rolloff, oversampling, span);
    if (!(tau_end > tau_begin)) throw InvalidArgument("delay region must satisfy begin < end");
    if (tau_begin < symbol_period * (1.0 - kGridEps))
        throw InvalidArgument("delay region must exclude the mainlobe [0, T)");
    if (tau_end > symbol_period * static_cast<double>(span) / 2.0 * (1.0 + kGridEps))
        throw InvalidArgument("delay region extends beyond half the pulse period");

    const PulseSpec start = rrc_pulse(symbol_period, rolloff, oversampling, span);
    const auto lags = region_lags(start, tau_begin, tau_end);
    if (lags.empty()) throw InvalidArgument("delay region contains no grid delays");

    const auto constraints = nyquist_constraints(rolloff, span);
    const Eigen::MatrixXd b = acf_operator(lags, start.half_band(), oversampling, span);
    const Eigen::MatrixXd hess = b.transpose() * b;
    const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess).eigenvalues().maxCoeff();
    auto objective = [&](const RVector& u) { return (b * u).squaredNorm(); };

    RVector u = constraints.project(start.half_spectrum());
    double value = objective(u);

    PulseDesign out;
    out.islr_before_db = region_islr(start, tau_begin, tau_end).value_db;
    out.objective_history.push_back(value);

    for (std::size_t it = 0; it < max_iters; ++it) {
        const RVector grad = 2.0 * hess * u;
        double step = 1.0 / lipschitz;
        RVector candidate;
        double candidate_value = value;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving) {
            candidate = constraints.project(u - step * grad);
            candidate_value = objective(candidate);
            if (candidate_value <= value) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) {
            // no descent along the projected arc: u is stationary to working precision
            out.converged = true;
            break;
        }
        const double decrease = value - candidate_value;
        u = candidate;
        value = candidate_value;
        out.objective_history.push_back(value);
        if (decrease <= tol * std::max(value, 1e-300)) {
            out.converged = true;
            break;
        }
    }

    out.pulse = pulse_from_half_spectrum(symbol_period, rolloff, oversampling, span, u);
    out.islr_after_db = region_islr(out.pulse, tau_begin, tau_end).value_db;
    return out;
}

}  // namespace isac
