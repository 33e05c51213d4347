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

#include "isac/sensing.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "isac/parallel.hpp"

namespace isac {

namespace {

// Below this length the O(N^2) definition is cheaper than three FFTs.
constexpr Eigen::Index kDirectAcfLimit = 128;

std::vector<cplx> to_std(const CVector& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); }

CVector periodic_direct(const CVector& s) {
    const Eigen::Index n = s.size();
    CVector r(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (Eigen::Index t = 0; t < n; ++t) acc += s[t] * std::conj(s[(t + k) % n]);
        r[k] = acc;
    }
    return r;
}

CVector aperiodic_direct(const CVector& s) {
    const Eigen::Index n = s.size();
    CVector r(2 * n - 1);
    for (Eigen::Index k = -(n - 1); k <= n - 1; ++k) {
        cplx acc{0.0, 0.0};
        for (Eigen::Index t = std::max<Eigen::Index>(0, -k); t < std::min(n, n - k); ++t)
            acc += s[t] * std::conj(s[t + k]);
        r[k + n - 1] = acc;
    }
    return r;
}

// r[k] = (1/M) sum_m |S_m|^2 exp(-j 2 pi m k / M) over a length-M transform.
std::vector<cplx> acf_by_fft(const CVector& s, std::size_t m) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(m, cplx{0.0, 0.0});
    for (Eigen::Index t = 0; t < s.size(); ++t) in[static_cast<std::size_t>(t)] = s[t];
    std::vector<cplx> spec;
    fft.fwd(spec, in);
    for (auto& v : spec) v = std::norm(v);
    std::vector<cplx> r;
    fft.fwd(r, spec);
    for (auto& v : r) v /= static_cast<double>(m);
    return r;
}

}  // namespace

std::string to_string(AcfMode mode) { return mode == AcfMode::periodic ? "periodic" : "aperiodic"; }

AcfMode parse_acf_mode(std::string_view name) {
    if (name == "periodic") return AcfMode::periodic;
    if (name == "aperiodic") return AcfMode::aperiodic;
    throw InvalidArgument("unknown ACF mode '" + std::string(name) + "'");
}

cplx Acf::at(long lag) const {
    const long n = static_cast<long>(length());
    if (mode_ == AcfMode::periodic) return values_[((lag % n) + n) % n];
    if (lag < -(n - 1) || lag > n - 1) return {0.0, 0.0};
    return values_[lag + n - 1];
}

Acf Acf::normalize() const {
    const cplx peak = at(0);
    if (std::abs(peak) == 0.0) throw InvalidArgument("cannot normalize an all-zero ACF");
    return Acf(values_ / peak, mode_, true);
}

Acf acf(const CVector& signal, AcfMode mode) {
    const Eigen::Index n = signal.size();
    if (n < 2) throw InvalidArgument("ACF needs a signal of length at least 2");
    if (n <= kDirectAcfLimit) return Acf(mode == AcfMode::periodic ? periodic_direct(signal) : aperiodic_direct(signal), mode);

    if (mode == AcfMode::periodic) {
        const auto r = acf_by_fft(signal, static_cast<std::size_t>(n));
        return Acf(Eigen::Map<const CVector>(r.data(), n), mode);
    }
    // zero padding to >= 2N - 1 turns the circular correlation into the linear one
    std::size_t m = 1;
    while (m < static_cast<std::size_t>(2 * n - 1)) m <<= 1;
    const auto r = acf_by_fft(signal, m);
    CVector out(2 * n - 1);
    for (Eigen::Index k = -(n - 1); k <= n - 1; ++k) out[k + n - 1] = r[static_cast<std::size_t>((k + static_cast<long>(m)) % static_cast<long>(m))];
    return Acf(std::move(out), mode);
}

RVector psd(const CVector& signal) {
    if (signal.size() < 2) throw InvalidArgument("PSD needs a signal of length at least 2");
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, to_std(signal));
    RVector out(signal.size());
    for (Eigen::Index m = 0; m < out.size(); ++m) out[m] = std::norm(spec[static_cast<std::size_t>(m)]);
    return out;
}

double isl(const Acf& r, std::size_t exclude_mainlobe_lags) {
    const long n = static_cast<long>(r.length());
    const long reach = r.mode() == AcfMode::periodic ? n / 2 : n - 1;
    if (exclude_mainlobe_lags == 0 || static_cast<long>(exclude_mainlobe_lags) > reach)
        throw InvalidArgument("mainlobe exclusion window covers every lag");
    const double peak = std::norm(r.at(0));
    if (peak == 0.0) throw InvalidArgument("ISL of an all-zero ACF is undefined");
    double side = 0.0;
    for (long k = r.min_lag(); k <= r.max_lag(); ++k) {
        const long dist = r.mode() == AcfMode::periodic ? std::min(k, n - k) : std::abs(k);
        if (dist >= static_cast<long>(exclude_mainlobe_lags)) side += std::norm(r.at(k));
    }
    return side / peak;
}

SensingStats summarize(const std::vector<double>& samples, double threshold, std::uint64_t seed) {
    SensingStats s;
    s.trials = samples.size();
    s.threshold = threshold;
    s.seed = seed;
    if (samples.empty()) return s;
    double sum = 0.0;
    std::size_t above = 0;
    for (double v : samples) {
        sum += v;
        if (v >= threshold) ++above;
    }
    s.mean = sum / static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.variance = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
    s.tail_prob = static_cast<double>(above) / static_cast<double>(samples.size());
    s.ci_halfwidth = 1.96 * std::sqrt(s.variance / static_cast<double>(samples.size()));
    return s;
}

SensingStats sensing_stats(const std::function<double(std::uint64_t)>& loss_sampler, double threshold,
                           std::size_t trials, std::uint64_t seed) {
    if (trials < 100) throw InvalidArgument("sensing_stats needs at least 100 trials");
    auto samples = run_trials(trials, seed, [&](Rng&, std::size_t i) {
        const double v = loss_sampler(derive_seed(seed, i));
        if (!std::isfinite(v)) throw Error("non-finite loss sample at trial " + std::to_string(i));
        return v;
    });
    return summarize(samples, threshold, seed);
}

long AcfProfile::lag_at(Eigen::Index idx) const {
    if (mode == AcfMode::periodic) return static_cast<long>(idx);
    return static_cast<long>(idx) - static_cast<long>((mean.size() - 1) / 2);
}

AcfProfile expected_acf_profile(const ModulationBasis& basis, const SymbolSource& source, std::size_t trials,
                                AcfMode mode, std::uint64_t seed) {
    if (trials < 2) throw InvalidArgument("expected_acf_profile needs at least 2 trials");
    auto powers = run_trials(trials, seed, [&](Rng& rng, std::size_t) -> RVector {
        const CVector x = modulate(basis, source.draw(basis.n(), rng)).time_samples;
        return acf(x, mode).values().cwiseAbs2();
    });
    AcfProfile out;
    out.mode = mode;
    out.trials = trials;
    out.mean = RVector::Zero(powers.front().size());
    for (const auto& p : powers) out.mean += p;
    out.mean /= static_cast<double>(trials);
    out.variance = RVector::Zero(out.mean.size());
    for (const auto& p : powers) out.variance += (p - out.mean).cwiseAbs2();
    out.variance /= static_cast<double>(trials - 1);
    return out;
}

SensingStats eisl(const ModulationBasis& basis, const SymbolSource& source, std::size_t trials, AcfMode mode,
                  std::uint64_t seed, std::size_t exclude_mainlobe_lags, double threshold) {
    if (trials < 2) throw InvalidArgument("EISL needs at least 2 trials");
    auto samples = run_trials(trials, seed, [&](Rng& rng, std::size_t i) {
        const CVector x = modulate(basis, source.draw(basis.n(), rng)).time_samples;
        if (x.squaredNorm() == 0.0) throw Error("all-zero symbol block at trial " + std::to_string(i));
        return isl(acf(x, mode), exclude_mainlobe_lags);
    });
    return summarize(samples, threshold, seed);
}

long range_to_bin(double range_m, double sample_rate) {
    return std::lround(2.0 * range_m / kSpeedOfLight * sample_rate);
}

double bin_to_range(long bin, double sample_rate) {
    return static_cast<double>(bin) * kSpeedOfLight / (2.0 * sample_rate);
}

RangeProfile range_profile(const CVector& signal, const RangeScene& scene, const PulseSpec* pulse, Rng& rng) {
    if (scene.targets.empty()) throw InvalidArgument("range scene needs at least one target");
    if (!(scene.sample_rate > 0.0)) throw InvalidArgument("range scene sample rate must be positive");
    if (scene.noise_power < 0.0) throw InvalidArgument("noise power must be nonnegative");
    if (pulse && std::abs(pulse->sample_rate() - scene.sample_rate) > 1e-9 * scene.sample_rate)
        throw InvalidArgument("scene sample rate does not match the pulse sample rate");

    const CVector tx = pulse ? shape_signal(signal, *pulse) : signal;
    const Eigen::Index n = tx.size();
    const double energy = tx.squaredNorm();
    if (energy == 0.0) throw InvalidArgument("transmitted block has zero energy");

    CVector echo = CVector::Zero(n);
    for (const auto& t : scene.targets) {
        if (t.range_m < 0.0) throw InvalidArgument("target range must be nonnegative");
        const long d = range_to_bin(t.range_m, scene.sample_rate);
        if (d >= n)
            throw InvalidArgument("target at " + std::to_string(t.range_m) + " m lies beyond the unambiguous window");
        for (Eigen::Index k = 0; k < n; ++k) echo[(k + d) % n] += t.amplitude * tx[k];
    }
    if (scene.noise_power > 0.0)
        for (Eigen::Index k = 0; k < n; ++k) echo[k] += rng.complex_normal(scene.noise_power);

    // corr[d] = sum_k y[k + d] conj(x[k])
    Eigen::FFT<double> fft;
    std::vector<cplx> ys, xs, prod(static_cast<std::size_t>(n)), corr;
    fft.fwd(ys, to_std(echo));
    fft.fwd(xs, to_std(tx));
    for (std::size_t m = 0; m < prod.size(); ++m) prod[m] = ys[m] * std::conj(xs[m]);
    fft.inv(corr, prod);

    RangeProfile out;
    out.range_m.resize(n);
    out.power.resize(n);
    for (Eigen::Index d = 0; d < n; ++d) {
        out.range_m[d] = bin_to_range(static_cast<long>(d), scene.sample_rate);
        out.power[d] = std::norm(corr[static_cast<std::size_t>(d)]) / (energy * energy);
    }
    return out;
}

}  // namespace isac
