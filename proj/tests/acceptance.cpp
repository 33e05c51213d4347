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

// Acceptance suite: one PASS/FAIL line per criterion, detail lines below it.
// Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/constellation.hpp"
#include "isac/experiment.hpp"
#include "isac/io.hpp"
#include "isac/parallel.hpp"
#include "isac/pcs.hpp"
#include "isac/precoding.hpp"
#include "isac/pulse.hpp"
#include "isac/random.hpp"
#include "isac/ranging.hpp"
#include "isac/sensing.hpp"
#include "isac/waveform.hpp"

#ifndef ISAC_SOURCE_DIR
#define ISAC_SOURCE_DIR "."
#endif

using namespace isac;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRoot = 20260417;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
        pass = pass && ok;
    }
    void note(const std::string& what) { details.push_back("info  " + what); }
};

std::string num(double x, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

int failures = 0;

void run_criterion(int id, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.check(false, std::string("unexpected exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.check(secs < limit_s, "runtime " + num(secs, 4) + " s < " + num(limit_s) + " s");
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << "\n";
    for (const auto& d : out.details) std::cout << "        " << d << "\n";
    std::cout.flush();
}

double se_of(const SensingStats& s) { return std::sqrt(s.variance / static_cast<double>(s.trials)); }

// --- 1 ---------------------------------------------------------------------

void kurtosis_values(Outcome& o) {
    const double k64 = moments(make_standard("64QAM")).kurtosis;
    o.check(std::abs(k64 - 1.38) <= 0.01, "uniform 64-QAM kurtosis " + num(k64, 10) + " = 1.38 +/- 0.01");

    for (const char* label : {"BPSK", "QPSK", "8PSK", "16PSK", "32PSK"}) {
        const double k = moments(make_standard(label)).kurtosis;
        o.check(std::abs(k - 1.0) < 1e-12, std::string(label) + " kurtosis " + num(k, 17) + " = 1");
    }

    // enumeration over the integer grid {-3,-1,1,3}^2
    double p2 = 0.0, p4 = 0.0;
    for (int a = -3; a <= 3; a += 2)
        for (int b = -3; b <= 3; b += 2) {
            const double e = a * a + b * b;
            p2 += e / 16.0;
            p4 += e * e / 16.0;
        }
    const double oracle = p4 / (p2 * p2);
    const double k16 = moments(make_standard("16QAM")).kurtosis;
    o.check(std::abs(k16 - oracle) < 1e-6 && std::abs(k16 - 1.32) < 1e-6,
            "16-QAM kurtosis " + num(k16, 12) + " vs enumeration " + num(oracle, 12));
}

// --- 2 ---------------------------------------------------------------------

void ofdm_optimality(Outcome& o) {
    const std::size_t n = 64, trials = 10000;
    const std::vector<BasisKind> kinds{BasisKind::SC, BasisKind::OFDM, BasisKind::OTFS, BasisKind::AFDM};
    std::vector<ModulationBasis> bases;
    for (BasisKind k : kinds) bases.push_back(build_basis(k, n));

    auto run = [&](const SymbolSource& src, const std::string& tag) {
        std::vector<SensingStats> s;
        for (std::size_t i = 0; i < bases.size(); ++i)
            s.push_back(eisl(bases[i], src, trials, AcfMode::periodic, derive_seed(kRoot, tag, i)));
        for (std::size_t i = 0; i < bases.size(); ++i)
            o.note(tag + " " + to_string(kinds[i]) + ": EISL " + num(s[i].mean) + " (se " + num(se_of(s[i]), 3) + ")");
        return s;
    };

    const auto qam = run(SymbolSource::from(make_standard("16QAM")), "16QAM");
    const std::size_t ofdm = 1;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        if (i == ofdm) continue;
        const double margin = qam[i].mean - qam[ofdm].mean;
        const double se = std::hypot(se_of(qam[i]), se_of(qam[ofdm]));
        o.check(margin > 3.0 * se, "EISL(" + to_string(kinds[i]) + ") - EISL(OFDM) = " + num(margin) + " > 3 se = " +
                                       num(3.0 * se, 3) + " (" + num(margin / se, 4) + " se)");
    }

    const auto gauss = run(SymbolSource::gaussian(), "gaussian");
    double worst = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i)
        for (std::size_t j = i + 1; j < bases.size(); ++j)
            worst = std::max(worst, std::abs(gauss[i].mean - gauss[j].mean) / std::hypot(se_of(gauss[i]), se_of(gauss[j])));
    o.check(worst < 3.0, "Gaussian codebook: largest pairwise EISL gap " + num(worst, 3) + " se < 3 se");
}

// --- 3 ---------------------------------------------------------------------

void wiener_khinchin(Outcome& o) {
    const std::size_t n = 64;
    const auto src = SymbolSource::from(make_standard("16QAM"));
    for (BasisKind kind : {BasisKind::SC, BasisKind::OFDM, BasisKind::OTFS, BasisKind::AFDM}) {
        const auto basis = build_basis(kind, n);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < 100; ++rep) {
            Rng rng(derive_seed(kRoot, "wk-" + to_string(kind), rep));
            const CVector x = modulate(basis, src.draw(n, rng)).time_samples;
            const Acf r = acf(x, AcfMode::periodic);
            const RVector s = psd(x);
            for (std::size_t m = 0; m < n; ++m) {
                cplx acc{0.0, 0.0};
                for (std::size_t k = 0; k < n; ++k)
                    acc += r.at(static_cast<long>(k)) * std::polar(1.0, 2.0 * kPi * static_cast<double>(k * m) / n);
                worst = std::max(worst, std::abs(acc - s[static_cast<Eigen::Index>(m)]));
            }
        }
        o.check(worst < 1e-9, to_string(kind) + ": max |DFT(ACF) - PSD| over 100 signals = " + num(worst, 3));
    }
}

// --- 4 ---------------------------------------------------------------------

void pulse_shaping(Outcome& o) {
    const PulseDesign d = design_pulse(1.0, 0.35, 16, 16, 1.5, 4.0);
    const double defect = nyquist_defect(d.pulse);
    o.check(defect < 1e-6, "designed pulse Nyquist defect " + num(defect, 3) + " < 1e-6");
    const double rrc_db = region_islr(rrc_pulse(1.0, 0.35), 1.5, 4.0).value_db;
    const double gain = rrc_db - d.islr_after_db;
    o.check(gain >= 3.0, "region ISLR RRC " + num(rrc_db, 5) + " dB, designed " + num(d.islr_after_db, 5) +
                             " dB, gain " + num(gain, 4) + " dB >= 3 dB");

    // 20 m strong / 30 m weak (-20 dB) scene, 10 ns symbols, 16x oversampling
    const double t = 1e-8;
    const double strong_m = 20.0, lo_m = 23.74, hi_m = 31.24;
    const PulseSpec rrc = rrc_pulse(t, 0.35, 16, 16);
    const PulseDesign scene_design =
        design_pulse(t, 0.35, 16, 16, 2.0 * (lo_m - strong_m) / kSpeedOfLight, 2.0 * (hi_m - strong_m) / kSpeedOfLight);
    o.note("scene design region [" + num(2.0 * (lo_m - strong_m) / kSpeedOfLight / t, 4) + "T, " +
           num(2.0 * (hi_m - strong_m) / kSpeedOfLight / t, 4) + "T], ISLR " + num(scene_design.islr_before_db, 4) +
           " -> " + num(scene_design.islr_after_db, 4) + " dB");

    RangeScene scene;
    scene.sample_rate = rrc.sample_rate();
    scene.noise_power = 0.1;
    scene.targets = {{strong_m, {1.0, 0.0}}, {30.0, {0.1, 0.0}}};
    WeakTargetOptions opt;
    opt.region_begin_m = lo_m;
    opt.region_end_m = hi_m;
    opt.trials = 1000;
    opt.seed = derive_seed(kRoot, "scene", 0);
    const auto src = SymbolSource::from(make_standard("16QAM"));
    const auto sc = build_basis(BasisKind::SC, 128);
    const auto ofdm = build_basis(BasisKind::OFDM, 128);

    for (const auto* basis : {&sc, &ofdm}) {
        const auto cmp = weak_target_improvement(scene, rrc, scene_design.pulse, *basis, src, opt);
        o.check(cmp.detect_b > cmp.detect_a, to_string(basis->kind()) + ": P_detect designed " + num(cmp.detect_b, 4) +
                                                 " > RRC " + num(cmp.detect_a, 4) + " (miss-rate reduction " +
                                                 num(100.0 * cmp.improvement, 3) + "%)");
    }
    const auto cmp = weak_target_improvement(scene, RangingSetup{&sc, &rrc}, RangingSetup{&ofdm, &rrc}, src, opt);
    o.check(cmp.detect_b > cmp.detect_a, "RRC: P_detect OFDM " + num(cmp.detect_b, 4) + " > SC " + num(cmp.detect_a, 4) +
                                             " (miss-rate reduction " + num(100.0 * cmp.improvement, 3) + "%)");
}

// --- 5 ---------------------------------------------------------------------

double oracle_mi(const Constellation& c, double noise_var, std::size_t samples, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::discrete_distribution<std::size_t> pick(c.probs().begin(), c.probs().end());
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var / 2.0));
    double acc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = pick(gen);
        const cplx y = c.points()[i] + cplx(gauss(gen), gauss(gen));
        const double own = std::norm(y - c.points()[i]);
        double mix = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j)
            mix += c.probs()[j] * std::exp(-(std::norm(y - c.points()[j]) - own) / noise_var);
        acc -= std::log2(mix);
    }
    return acc / static_cast<double>(samples);
}

void constellation_shaping(Outcome& o) {
    const auto base = make_standard("64QAM");
    const auto ch = AwgnChannel::from_snr_db(10.0);
    const double uniform = mutual_information(base, ch);

    bool monotone = true;
    double worst_drop = 0.0;
    ShapingResult at138, at1;
    for (double cap : {1.0, 1.1, 1.2, 1.38}) {
        const auto r = shape(ShapingProblem{base, cap, ch});
        for (std::size_t i = 1; i < r.mi_history.size(); ++i) {
            const double drop = r.mi_history[i - 1] - r.mi_history[i];
            worst_drop = std::max(worst_drop, drop);
            monotone = monotone && drop <= 0.0;
        }
        o.note("cap " + num(cap) + ": MI " + num(r.mi_bits, 8) + " bits, kurtosis " + num(r.achieved_kurtosis, 8) +
               ", " + std::to_string(r.iterations) + " iterations" + (r.cap_attainable ? "" : ", cap below alphabet minimum"));
        if (cap == 1.38) at138 = r;
        if (cap == 1.0) at1 = r;
    }
    o.check(monotone, "MI non-decreasing across BA iterations (largest drop " + num(worst_drop, 3) + " bits)");
    o.check(std::abs(at138.mi_bits - uniform) <= 0.05,
            "cap 1.38: MI " + num(at138.mi_bits, 8) + " vs uniform " + num(uniform, 8) + " bits, |diff| <= 0.05");

    // rings nearest unit power: |x|^2 = 34/42 and 50/42
    double mass = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double e = std::norm(base.points()[i]) * 42.0;
        if (std::abs(e - 34.0) < 1e-6 || std::abs(e - 50.0) < 1e-6) mass += at1.probs[i];
    }
    o.check(mass >= 0.9, "cap 1.0: mass on the two rings nearest unit power " + num(mass, 8) + " >= 0.9");

    for (double snr : {0.0, 10.0, 20.0}) {
        const auto c = AwgnChannel::from_snr_db(snr);
        const double quad = mutual_information(base, c);
        const double mc = oracle_mi(base, c.noise_variance, 1000000, static_cast<unsigned>(snr) + 1);
        o.check(std::abs(quad - mc) < 0.01, num(snr) + " dB: quadrature " + num(quad, 8) + " vs 1e6-sample MC " +
                                                num(mc, 8) + " bits, |diff| < 0.01");
    }
}

// --- 6 ---------------------------------------------------------------------

void precoding(Outcome& o) {
    const double noise = 1.0;
    const auto gauss = SymbolSource::gaussian();

    for (auto [nt, len] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 16}, {8, 24}, {16, 32}}) {
        TirModel m;
        m.n_tx = nt;
        m.n_rx = nt;
        m.noise_var = noise;
        m.frame_len = len;
        const double p = static_cast<double>(nt);
        const CMatrix w = std::sqrt(p / nt) * CMatrix::Identity(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nt));
        const auto s = ergodic_error(w, m, gauss, ErrorMetric::LSE, 100000, derive_seed(kRoot, "wishart", nt));
        const double closed = noise * nt * (nt / p) * static_cast<double>(nt) / static_cast<double>(len - nt);
        const double rel = std::abs(s.stats.mean - closed) / closed;
        o.check(rel < 0.02, "(n_tx, L) = (" + std::to_string(nt) + ", " + std::to_string(len) + "): ELSE " +
                                num(s.stats.mean) + " vs closed form " + num(closed) + ", rel err " + num(rel, 3));
    }

    // ELSE / LSE against the orthogonal-pilot optimum
    const std::size_t nt = 16;
    const double power = 16.0;
    std::vector<double> ratios;
    for (std::size_t len : {32, 48, 64, 128, 256}) {
        TirModel m;
        m.n_tx = nt;
        m.n_rx = nt;
        m.frame_len = len;
        const auto s = ergodic_error(CMatrix::Identity(16, 16), m, gauss, ErrorMetric::LSE, 20000,
                                     derive_seed(kRoot, "ratio", len));
        const double lse = noise * nt * static_cast<double>(nt * nt) / (power * static_cast<double>(len));
        ratios.push_back(s.stats.mean / lse);
        o.note("L = " + std::to_string(len) + ": ELSE / LSE = " + num(ratios.back(), 5));
    }
    o.check(std::abs(ratios[0] - 2.0) <= 0.05, "ELSE / LSE at (16, 32) = " + num(ratios[0], 5) + " = 2.0 +/- 0.05");
    bool decreasing = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) decreasing = decreasing && ratios[i] < ratios[i - 1];
    o.check(decreasing && ratios.back() < 1.1, "ratio decreases with L toward 1 (" + num(ratios.back(), 5) + " at L = 256)");

    TirModel m;
    m.n_tx = nt;
    m.n_rx = nt;
    m.frame_len = 32;
    const std::uint64_t eval_seed = derive_seed(kRoot, "precoder-eval", 0);
    const std::size_t eval_trials = 20000;

    auto ddp = run_trials(eval_trials, eval_seed, [&](Rng& rng, std::size_t) {
        const CMatrix s = gauss.draw(nt, 32, rng);
        return lse_error(ddp_precoder(s, power, nt) * s, m);
    });
    const SensingStats ddp_s = summarize(ddp, std::numeric_limits<double>::infinity(), eval_seed);
    const double ddp_rel_var = ddp_s.variance / (ddp_s.mean * ddp_s.mean);
    o.check(ddp_rel_var < 1e-12, "DDP instantaneous error " + num(ddp_s.mean) + ", relative variance " + num(ddp_rel_var, 3));

    DipOptions opt;
    opt.sa_trials = 500;
    opt.iters = 300;
    opt.seed = derive_seed(kRoot, "dip", 0);
    const auto dip = dip_precoder(m, gauss, power, ErrorMetric::LSE, std::nullopt, opt);
    const CMatrix baseline = CMatrix::Identity(16, 16);
    const auto grams = frozen_grams(gauss, nt, 32, opt.sa_trials, derive_seed(opt.seed, "dip-samples", 0));
    const double base_saa = sample_average_error(baseline, grams, m, ErrorMetric::LSE);
    const auto dip_fresh = ergodic_error(dip.precoder, m, gauss, ErrorMetric::LSE, eval_trials, eval_seed);
    const auto base_fresh = ergodic_error(baseline, m, gauss, ErrorMetric::LSE, eval_trials, eval_seed);
    const double se = std::hypot(se_of(dip_fresh.stats), se_of(base_fresh.stats));

    o.check(dip.precoder.squaredNorm() <= power + 1e-9, "DIP power " + num(dip.precoder.squaredNorm(), 8) + " <= " + num(power));
    o.check(ddp_s.mean < dip_fresh.stats.mean, "DDP ELSE " + num(ddp_s.mean) + " < DIP ELSE " + num(dip_fresh.stats.mean));
    o.check(dip.objective <= base_saa, "DIP <= baseline on the design sample set: " + num(dip.objective, 8) + " <= " +
                                           num(base_saa, 8));
    o.check(dip_fresh.stats.mean <= base_fresh.stats.mean + 3.0 * se,
            "DIP <= baseline on fresh frames within 3 se: " + num(dip_fresh.stats.mean, 8) + " vs " +
                num(base_fresh.stats.mean, 8) + " (3 se = " + num(3.0 * se, 3) + ")");
    {
        auto d = run_trials(eval_trials, eval_seed, [&](Rng& rng, std::size_t) {
            const CMatrix s = gauss.draw(nt, 32, rng);
            return lse_error(dip.precoder * s, m) - lse_error(baseline * s, m);
        });
        const SensingStats ds = summarize(d, std::numeric_limits<double>::infinity(), eval_seed);
        o.note("paired fresh-frame gap DIP - baseline " + num(ds.mean, 4) + " (paired se " + num(se_of(ds), 3) +
               "), the identity is already ergodic-optimal here");
    }

    Rng ch_rng(derive_seed(kRoot, "channel", 0));
    CMatrix h(8, 16);
    for (Eigen::Index j = 0; j < 16; ++j)
        for (Eigen::Index i = 0; i < 8; ++i) h(i, j) = ch_rng.complex_normal();
    CommLink link{h, 1.0, 0.0};
    const double cap = link_capacity(link, power);
    const double base_rate = comm_rate(baseline, link);
    link.rate_floor = base_rate + 0.5 * (cap - base_rate);
    DipOptions copt;
    copt.sa_trials = 200;
    copt.iters = 150;
    copt.seed = derive_seed(kRoot, "dip", 1);
    const auto cdip = dip_precoder(m, gauss, power, ErrorMetric::LSE, link, copt);
    o.check(cdip.rate >= link.rate_floor - 1e-3, "rate-constrained DIP: rate " + num(cdip.rate, 8) + " meets R0 " +
                                                     num(link.rate_floor, 8) + " within 1e-3 (capacity " + num(cap, 6) + ")");
    o.note("rate-constrained DIP sample-average error " + num(cdip.objective, 6) + " vs unconstrained " + num(dip.objective, 6));

    link.rate_floor = cap + 1.0;
    bool infeasible = false;
    double achieved = 0.0;
    try {
        dip_precoder(m, gauss, power, ErrorMetric::LSE, link, copt);
    } catch (const Infeasible& e) {
        infeasible = true;
        achieved = e.achieved().value_or(-1.0);
    }
    o.check(infeasible && std::abs(achieved - cap) < 1e-9,
            "R0 = capacity + 1 reported infeasible with achievable rate " + num(achieved, 8));
}

// --- 7 ---------------------------------------------------------------------

void set_threads(const char* v) { setenv("ISAC_THREADS", v, 1); }

void determinism(Outcome& o) {
    const fs::path configs = fs::path(ISAC_SOURCE_DIR) / "configs";
    const fs::path work = fs::temp_directory_path() / "isac_acceptance_determinism";
    fs::remove_all(work);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(configs))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    o.check(files.size() == experiment_names().size(), std::to_string(files.size()) + " shipped configs found");

    for (const auto& f : files) {
        const std::string text = read_file(f);
        const std::string stem = f.stem().string();
        set_threads("1");
        const auto a = run_experiment(text, RunOverrides{work / (stem + "_a"), std::nullopt});
        set_threads("4");
        const auto b = run_experiment(text, RunOverrides{work / (stem + "_b"), std::nullopt});
        unsetenv("ISAC_THREADS");

        std::size_t csvs = 0, identical = 0;
        for (const auto& out : a.outputs) {
            if (fs::path(out.file).extension() != ".csv") continue;
            ++csvs;
            if (read_file(a.output_dir / out.file) == read_file(b.output_dir / out.file)) ++identical;
        }
        o.check(csvs > 0 && csvs == identical, stem + ": " + std::to_string(identical) + "/" + std::to_string(csvs) +
                                                   " CSVs byte-identical across reruns (1 vs 4 workers)");
    }
    fs::remove_all(work);
}

}  // namespace

int main() {
    std::cout << "acceptance suite, root seed " << kRoot << "\n";
    run_criterion(1, "kurtosis values", 1.0, kurtosis_values);
    run_criterion(2, "OFDM minimizes expected ISL under sub-Gaussian symbols", 120.0, ofdm_optimality);
    run_criterion(3, "Wiener-Khinchin identity", 10.0, wiener_khinchin);
    run_criterion(4, "Nyquist pulse design and weak-target scene", 300.0, pulse_shaping);
    run_criterion(5, "kurtosis-constrained constellation shaping", 300.0, constellation_shaping);
    run_criterion(6, "ergodic-error precoding", 600.0, precoding);
    run_criterion(7, "determinism of experiment outputs", 600.0, determinism);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
