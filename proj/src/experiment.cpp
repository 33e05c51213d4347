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

#include "isac/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numeric>
#include <set>
#include <variant>

#include "isac/constellation.hpp"
#include "isac/io.hpp"
#include "isac/parallel.hpp"
#include "isac/pcs.hpp"
#include "isac/precoding.hpp"
#include "isac/pulse.hpp"
#include "isac/random.hpp"
#include "isac/ranging.hpp"
#include "isac/sensing.hpp"
#include "isac/waveform.hpp"

namespace isac {

using nlohmann::json;

std::string to_string(const Diagnostic& d) {
    return (d.path.empty() ? std::string("<config>") : d.path) + ": " + d.message;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
    std::string out = "invalid config";
    for (const auto& d : diags) out += "\n  " + to_string(d);
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : InvalidArgument(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<std::string> experiment_names() { return {"acf-compare", "pulse-design", "range-scene", "pcs", "precoding"}; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Strict reader over one JSON object. Every getter consumes its key and
// finish() flags whatever is left, so a misspelt key never falls back to a default.
class Reader {
  public:
    Reader(const json& obj, std::string prefix, std::vector<Diagnostic>& diags)
        : obj_(obj), prefix_(std::move(prefix)), diags_(diags) {}

    std::vector<Diagnostic>& diags() { return diags_; }
    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
    void error(const std::string& key, const std::string& msg) { diags_.push_back({path(key), msg}); }

    const json* take(const std::string& key, bool required) {
        used_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            if (required) error(key, "required field is missing");
            return nullptr;
        }
        return &*it;
    }

    std::uint64_t u64(const std::string& key, std::optional<std::uint64_t> def) {
        const json* v = take(key, !def);
        if (!v) return def.value_or(0);
        if (v->is_number_unsigned()) return v->get<std::uint64_t>();
        error(key, v->is_number_integer() ? "must be nonnegative" : "must be an integer");
        return def.value_or(0);
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> def, std::size_t lo,
                      std::size_t hi = std::numeric_limits<std::size_t>::max()) {
        const json* v = take(key, !def);
        if (!v) return def.value_or(lo);
        if (!v->is_number_integer()) {
            error(key, "must be an integer");
            return def.value_or(lo);
        }
        const auto x = v->get<std::int64_t>();
        if (x < static_cast<std::int64_t>(lo) || static_cast<std::uint64_t>(x) > hi) {
            error(key, hi == std::numeric_limits<std::size_t>::max()
                           ? "must be at least " + std::to_string(lo)
                           : "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return def.value_or(lo);
        }
        return static_cast<std::size_t>(x);
    }

    long integer(const std::string& key, long def, long lo) {
        const json* v = take(key, false);
        if (!v) return def;
        if (!v->is_number_integer() || v->get<std::int64_t>() < lo) {
            error(key, "must be an integer >= " + std::to_string(lo));
            return def;
        }
        return static_cast<long>(v->get<std::int64_t>());
    }

    // open_lo excludes the lower bound itself
    double number(const std::string& key, std::optional<double> def, double lo = -kInf, double hi = kInf,
                  bool open_lo = false) {
        const json* v = take(key, !def);
        if (!v) return def.value_or(0.0);
        if (!v->is_number()) {
            error(key, "must be a number");
            return def.value_or(0.0);
        }
        const double x = v->get<double>();
        if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
            error(key, "value " + format_double(x) + " outside " + (open_lo ? "(" : "[") + format_double(lo) + ", " +
                           format_double(hi) + "]");
            return def.value_or(0.0);
        }
        return x;
    }

    std::optional<double> opt_number(const std::string& key, double lo = -kInf, double hi = kInf) {
        if (!obj_.contains(key)) {
            used_.insert(key);
            return std::nullopt;
        }
        return number(key, 0.0, lo, hi);
    }

    std::string str(const std::string& key, std::optional<std::string> def) {
        const json* v = take(key, !def);
        if (!v) return def.value_or("");
        if (!v->is_string()) {
            error(key, "must be a string");
            return def.value_or("");
        }
        return v->get<std::string>();
    }

    std::vector<std::string> strings(const std::string& key, std::vector<std::string> def) {
        const json* v = take(key, false);
        if (!v) return def;
        if (!v->is_array() || v->empty()) {
            error(key, "must be a non-empty array of strings");
            return def;
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_string()) {
                error(key + "[" + std::to_string(i) + "]", "must be a string");
                return def;
            }
            out.push_back((*v)[i].get<std::string>());
        }
        return out;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> def, std::size_t exact_len = 0) {
        const json* v = take(key, false);
        if (!v) return def;
        if (!v->is_array() || v->empty() || (exact_len && v->size() != exact_len)) {
            error(key, exact_len ? "must be an array of " + std::to_string(exact_len) + " numbers"
                                 : "must be a non-empty array of numbers");
            return def;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                error(key + "[" + std::to_string(i) + "]", "must be a finite number");
                return def;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def) {
        const json* v = take(key, false);
        if (!v) return def;
        if (!v->is_array() || v->empty()) {
            error(key, "must be a non-empty array of integers");
            return def;
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number_unsigned()) {
                error(key + "[" + std::to_string(i) + "]", "must be a nonnegative integer");
                return def;
            }
            out.push_back((*v)[i].get<std::size_t>());
        }
        return out;
    }

    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key())) diags_.push_back({path(it.key()), "unknown field"});
    }

  private:
    const json& obj_;
    std::string prefix_;
    std::vector<Diagnostic>& diags_;
    std::set<std::string> used_;
};

struct Common {
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::filesystem::path output_dir;
};

struct AcfParams {
    std::vector<BasisKind> bases;
    std::string constellation;
    std::size_t n = 64;
    AcfMode mode = AcfMode::periodic;
    std::size_t exclude_lags = 1;
    BasisParams basis_params;
};

struct PulseParams {
    double beta = 0.35;
    double symbol_period = 1.0;
    std::size_t oversampling = 16;
    std::size_t span = 16;
    std::vector<double> region_t{1.5, 4.0};  // in symbol periods
    std::size_t iters = 5000;
    double tol = 1e-10;
};

struct SceneTargetParams {
    double range_m = 0.0;
    double gain_db = 0.0;
};

struct RangeParams {
    std::size_t n = 128;
    std::string constellation;
    std::vector<BasisKind> bases;
    double symbol_period = 1e-8;
    double beta = 0.35;
    std::size_t oversampling = 16;
    std::size_t span = 16;
    std::vector<SceneTargetParams> targets;
    std::vector<double> region_m;
    double noise_power = 0.1;
    long tolerance_bins = -1;
    std::size_t design_iters = 5000;
    double design_tol = 1e-10;
    std::size_t profile_trials = 200;
};

struct PcsParams {
    std::string base;
    std::vector<double> kappas;
    double snr_db = 10.0;
    double tolerance = 1e-9;
    std::size_t max_iters = 2000;
    std::size_t quadrature_order = 16;
};

struct PrecodingParams {
    std::size_t n_tx = 16;
    std::size_t n_rx = 16;
    std::size_t n_cu = 8;
    std::vector<std::size_t> frame_lengths;
    double power = 16.0;
    double noise_var = 1.0;
    double comm_noise_var = 1.0;
    double rate_floor = 0.0;
    std::string symbols;
    ErrorMetric metric = ErrorMetric::LSE;
    std::optional<double> prior_var;
    std::size_t sa_trials = 500;
    std::size_t iters = 300;
};

using Params = std::variant<AcfParams, PulseParams, RangeParams, PcsParams, PrecodingParams>;

struct ParsedConfig {
    json canonical;  // effective config, output_dir removed
    Common common;
    Params params;
};

bool valid_symbol_label(const std::string& label) {
    if (label == "gaussian") return true;
    try {
        make_standard(label);
        return true;
    } catch (const InvalidArgument&) {
        return false;
    }
}

SymbolSource symbol_source(const std::string& label) {
    return label == "gaussian" ? SymbolSource::gaussian() : SymbolSource::from(make_standard(label));
}

std::vector<BasisKind> parse_bases(Reader& r, const std::string& key, std::vector<std::string> def) {
    const auto names = r.strings(key, std::move(def));
    std::vector<BasisKind> out;
    std::set<BasisKind> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string at = key + "[" + std::to_string(i) + "]";
        BasisKind kind;
        try {
            kind = parse_basis_kind(names[i]);
        } catch (const InvalidArgument&) {
            r.error(at, "unknown basis '" + names[i] + "', expected SC, OFDM, OTFS or AFDM");
            continue;
        }
        if (!seen.insert(kind).second)
            r.error(at, "duplicate basis '" + names[i] + "'");
        else
            out.push_back(kind);
    }
    return out;
}

bool is_factorizable(std::size_t n) {
    for (std::size_t m = 2; m * m <= n; ++m)
        if (n % m == 0) return true;
    return false;
}

void check_otfs_grid(Reader& r, const std::vector<BasisKind>& bases, std::size_t n, const BasisParams& bp) {
    if (std::find(bases.begin(), bases.end(), BasisKind::OTFS) == bases.end()) return;
    if (bp.delay_bins == 0 && bp.doppler_bins == 0) {
        if (!is_factorizable(n))
            r.error("N", "OTFS needs N = delay_bins * doppler_bins with both above 1, N = " + std::to_string(n) +
                             " is not factorizable");
    } else if (bp.delay_bins * bp.doppler_bins != n) {
        r.error("otfs_delay_bins", "otfs_delay_bins * otfs_doppler_bins must equal N");
    }
}

BasisParams parse_basis_params(Reader& r) {
    BasisParams bp;
    bp.delay_bins = r.count("otfs_delay_bins", 0, 0);
    bp.doppler_bins = r.count("otfs_doppler_bins", 0, 0);
    bp.chirp1 = r.opt_number("afdm_c1");
    bp.chirp2 = r.opt_number("afdm_c2");
    return bp;
}

AcfParams parse_acf(Reader& r, const Common& common) {
    AcfParams p;
    p.bases = parse_bases(r, "bases", {"SC", "OFDM", "OTFS", "AFDM"});
    p.constellation = r.str("constellation", std::string("16QAM"));
    if (!valid_symbol_label(p.constellation)) r.error("constellation", "unknown constellation '" + p.constellation + "'");
    p.n = r.count("N", 64, 2, kMaxDenseBasis);
    const auto mode = r.str("mode", std::string("periodic"));
    try {
        p.mode = parse_acf_mode(mode);
    } catch (const InvalidArgument&) {
        r.error("mode", "must be 'periodic' or 'aperiodic'");
    }
    p.exclude_lags = r.count("exclude_lags", 1, 1);
    if (p.exclude_lags >= p.n) r.error("exclude_lags", "mainlobe exclusion covers every lag");
    p.basis_params = parse_basis_params(r);
    check_otfs_grid(r, p.bases, p.n, p.basis_params);
    if (common.trials < 100) r.error("trials", "acf-compare needs at least 100 trials");
    return p;
}

void check_pulse_grid(Reader& r, std::size_t span) {
    if (span % 2 != 0) r.error("span", "must be even");
}

void check_region(Reader& r, const std::string& key, double begin_t, double end_t, std::size_t oversampling,
                  std::size_t span) {
    if (!(end_t > begin_t)) {
        r.error(key, "region end must exceed its start");
        return;
    }
    if (begin_t < 1.0 - 1e-9) r.error(key, "region must exclude the mainlobe, i.e. start at least one symbol period out");
    if (end_t > static_cast<double>(span) / 2.0 + 1e-9) r.error(key, "region must end within half the pulse span");
    const double k = static_cast<double>(oversampling);
    if (std::floor(end_t * k + 1e-9) < std::ceil(begin_t * k - 1e-9)) r.error(key, "region contains no sample-grid delays");
}

PulseParams parse_pulse(Reader& r) {
    PulseParams p;
    p.beta = r.number("beta", 0.35, 0.0, 1.0);
    p.symbol_period = r.number("symbol_period", 1.0, 0.0, kInf, true);
    p.oversampling = r.count("oversampling", 16, 4, 256);
    p.span = r.count("span", 16, 8, 256);
    check_pulse_grid(r, p.span);
    p.region_t = r.numbers("region_t", {1.5, 4.0}, 2);
    p.iters = r.count("iters", 5000, 1);
    p.tol = r.number("tol", 1e-10, 0.0, 1.0);
    if (p.region_t.size() == 2) check_region(r, "region_t", p.region_t[0], p.region_t[1], p.oversampling, p.span);
    return p;
}

RangeParams parse_range(Reader& r) {
    RangeParams p;
    p.n = r.count("N", 128, 2, kMaxDenseBasis);
    p.constellation = r.str("constellation", std::string("16QAM"));
    if (!valid_symbol_label(p.constellation)) r.error("constellation", "unknown constellation '" + p.constellation + "'");
    p.bases = parse_bases(r, "bases", {"SC", "OFDM"});
    const BasisParams bp = parse_basis_params(r);
    check_otfs_grid(r, p.bases, p.n, bp);
    p.symbol_period = r.number("symbol_period", 1e-8, 0.0, kInf, true);
    p.beta = r.number("beta", 0.35, 0.0, 1.0);
    p.oversampling = r.count("oversampling", 16, 4, 256);
    p.span = r.count("span", 16, 8, 256);
    check_pulse_grid(r, p.span);
    if (p.n < p.span) r.error("N", "block must be at least as long as the pulse span");
    p.noise_power = r.number("noise_power", 0.1, 0.0);
    p.tolerance_bins = r.integer("tolerance_bins", -1, -1);
    p.design_iters = r.count("design_iters", 5000, 1);
    p.design_tol = r.number("design_tol", 1e-10, 0.0, 1.0);
    p.profile_trials = r.count("profile_trials", 200, 1);
    p.region_m = r.numbers("region_m", {23.74, 31.24}, 2);

    p.targets = {{20.0, 0.0}, {30.0, -20.0}};
    if (const json* t = r.take("targets", false)) {
        if (!t->is_array() || t->size() < 2) {
            r.error("targets", "must be an array of at least two {range_m, gain_db} objects");
        } else {
            p.targets.clear();
            for (std::size_t i = 0; i < t->size(); ++i) {
                const std::string key = "targets[" + std::to_string(i) + "]";
                if (!(*t)[i].is_object()) {
                    r.error(key, "must be an object {range_m, gain_db}");
                    continue;
                }
                Reader tr((*t)[i], r.path(key), r.diags());
                SceneTargetParams st;
                st.range_m = tr.number("range_m", std::nullopt, 0.0);
                st.gain_db = tr.number("gain_db", 0.0, -300.0, 300.0);
                tr.finish();
                p.targets.push_back(st);
            }
        }
    }
    return p;
}

// Cross-field geometry for the ranging scene, mirroring the checks the
// detector performs so that validation and execution agree.
void check_scene_geometry(Reader& r, const RangeParams& p) {
    if (p.targets.size() < 2 || p.region_m.size() != 2) return;
    const auto by_gain = [](const auto& a, const auto& b) { return a.gain_db < b.gain_db; };
    const auto weak = *std::min_element(p.targets.begin(), p.targets.end(), by_gain);
    const auto strong = *std::max_element(p.targets.begin(), p.targets.end(), by_gain);
    if (weak.gain_db == strong.gain_db) {
        r.error("targets", "targets need distinct gains to single out the weak one");
        return;
    }
    const double fs = static_cast<double>(p.oversampling) / p.symbol_period;
    const long total = static_cast<long>(p.n * p.oversampling);
    for (std::size_t i = 0; i < p.targets.size(); ++i)
        if (range_to_bin(p.targets[i].range_m, fs) >= total)
            r.error("targets[" + std::to_string(i) + "].range_m", "target lies beyond the unambiguous window");

    const double lo = p.region_m[0], hi = p.region_m[1];
    if (!(hi > lo)) {
        r.error("region_m", "region end must exceed its start");
        return;
    }
    const long first = static_cast<long>(std::ceil(2.0 * lo / kSpeedOfLight * fs));
    const long last = static_cast<long>(std::floor(2.0 * hi / kSpeedOfLight * fs));
    const long strong_bin = range_to_bin(strong.range_m, fs);
    const long weak_bin = range_to_bin(weak.range_m, fs);
    if (first > last) r.error("region_m", "region contains no delay bins");
    if (strong_bin >= first && strong_bin <= last) r.error("region_m", "region must exclude the strongest target");
    if (weak_bin < first || weak_bin > last) r.error("region_m", "region must contain the weakest target");

    // the designed pulse suppresses sidelobes of the strong echo over the region
    const double t = p.symbol_period;
    const double begin_t = 2.0 * (lo - strong.range_m) / kSpeedOfLight / t;
    const double end_t = 2.0 * (hi - strong.range_m) / kSpeedOfLight / t;
    check_region(r, "region_m", begin_t, end_t, p.oversampling, p.span);
}

PcsParams parse_pcs(Reader& r) {
    PcsParams p;
    p.base = r.str("base", std::string("64QAM"));
    if (p.base == "gaussian" || !valid_symbol_label(p.base)) r.error("base", "unknown constellation '" + p.base + "'");
    p.kappas = r.numbers("kappas", {1.0, 1.1, 1.2, 1.38});
    for (std::size_t i = 0; i < p.kappas.size(); ++i)
        if (p.kappas[i] < 1.0) r.error("kappas[" + std::to_string(i) + "]", "kurtosis below 1 infeasible");
    if (!std::is_sorted(p.kappas.begin(), p.kappas.end())) r.error("kappas", "kurtosis caps must be sorted ascending");
    p.snr_db = r.number("snr_db", 10.0, -50.0, 80.0);
    p.tolerance = r.number("tolerance", 1e-9, 0.0, 1.0);
    p.max_iters = r.count("max_iters", 2000, 1);
    p.quadrature_order = r.count("quadrature_order", 16, 8, 64);
    return p;
}

PrecodingParams parse_precoding(Reader& r, const Common& common) {
    PrecodingParams p;
    p.n_tx = r.count("n_tx", 16, 1, 256);
    p.n_rx = r.count("n_rx", 16, 1, 256);
    p.n_cu = r.count("n_cu", 8, 1, 256);
    p.frame_lengths = r.counts("frame_lengths", {32, 48, 64, 128});
    for (std::size_t i = 0; i < p.frame_lengths.size(); ++i)
        if (p.frame_lengths[i] < p.n_tx)
            r.error("frame_lengths[" + std::to_string(i) + "]", "frame length must be at least n_tx");
    p.power = r.number("power", 16.0, 0.0, kInf, true);
    p.noise_var = r.number("noise_var", 1.0, 0.0, kInf, true);
    p.comm_noise_var = r.number("comm_noise_var", 1.0, 0.0, kInf, true);
    p.rate_floor = r.number("rate_floor", 0.0, 0.0);
    p.symbols = r.str("symbols", std::string("gaussian"));
    if (!valid_symbol_label(p.symbols)) r.error("symbols", "unknown constellation '" + p.symbols + "'");
    const auto metric = r.str("metric", std::string("LSE"));
    try {
        p.metric = parse_error_metric(metric);
    } catch (const InvalidArgument&) {
        r.error("metric", "must be 'LSE' or 'LMMSE'");
    }
    p.prior_var = r.opt_number("prior_var", 0.0);
    if (p.prior_var && !(*p.prior_var > 0.0)) r.error("prior_var", "must be positive");
    if (p.metric == ErrorMetric::LMMSE && !p.prior_var) r.error("prior_var", "LMMSE needs a prior variance");
    p.sa_trials = r.count("sa_trials", 500, 100);
    p.iters = r.count("iters", 300, 1);
    if (common.trials < 100) r.error("trials", "precoding needs at least 100 trials");
    return p;
}

std::optional<ParsedConfig> parse_config(std::string_view text, const RunOverrides& overrides,
                                         std::vector<Diagnostic>& diags) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        diags.push_back({"", std::string("malformed JSON: ") + e.what()});
        return std::nullopt;
    }
    if (!doc.is_object()) {
        diags.push_back({"", "config must be a JSON object"});
        return std::nullopt;
    }
    if (overrides.seed) doc["seed"] = *overrides.seed;
    if (overrides.output_dir) doc["output_dir"] = overrides.output_dir->string();

    ParsedConfig cfg;
    Reader r(doc, "", diags);
    cfg.common.experiment = r.str("experiment", std::nullopt);
    cfg.common.seed = r.u64("seed", std::nullopt);
    cfg.common.trials = r.count("trials", std::nullopt, 1);
    cfg.common.output_dir = r.str("output_dir", std::nullopt);
    if (doc.contains("output_dir") && doc["output_dir"].is_string()) {
        std::error_code ec;
        const std::filesystem::path out = cfg.common.output_dir;
        if (out.empty())
            r.error("output_dir", "must not be empty");
        else if (std::filesystem::exists(out, ec) && !std::filesystem::is_directory(out, ec))
            r.error("output_dir", "exists and is not a directory");
    }

    const auto& e = cfg.common.experiment;
    if (e == "acf-compare") {
        cfg.params = parse_acf(r, cfg.common);
    } else if (e == "pulse-design") {
        cfg.params = parse_pulse(r);
    } else if (e == "range-scene") {
        const std::size_t before = diags.size();
        auto p = parse_range(r);
        if (diags.size() == before) check_scene_geometry(r, p);
        cfg.params = std::move(p);
    } else if (e == "pcs") {
        cfg.params = parse_pcs(r);
    } else if (e == "precoding") {
        cfg.params = parse_precoding(r, cfg.common);
    } else {
        if (doc.contains("experiment") && doc["experiment"].is_string())
            r.error("experiment", "unknown experiment '" + e + "'");
        return std::nullopt;  // per-experiment keys cannot be judged without a known experiment
    }
    r.finish();
    if (!diags.empty()) return std::nullopt;

    doc.erase("output_dir");
    cfg.canonical = std::move(doc);
    return cfg;
}

// ---------------------------------------------------------------------------
// Output bookkeeping

class OutputSet {
  public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        write_atomic(dir_ / name, content);
        records_.push_back({name, sha256_hex(content), content.size()});
    }
    void write_csv(const std::string& name, const CsvTable& table) { write(name, table.render()); }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    std::vector<OutputRecord> records() const { return records_; }

  private:
    std::filesystem::path dir_;
    std::vector<OutputRecord> records_;
};

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::uint64_t child_seed(std::uint64_t root, std::string_view pipeline, std::uint64_t index) {
    return derive_seed(root, pipeline, index);
}

// ---------------------------------------------------------------------------
// Pipelines. Each returns true when every iterative solver converged.

bool run_acf(const Common& c, const AcfParams& p, OutputSet& out) {
    const SymbolSource source = symbol_source(p.constellation);
    // common random numbers: every basis sees the same symbol blocks
    const std::uint64_t eisl_seed = child_seed(c.seed, "acf-compare", 0);
    const std::uint64_t profile_seed = child_seed(c.seed, "acf-compare", 1);

    CsvTable summary({"basis", "eisl_mean", "eisl_variance", "std_error", "ci_halfwidth", "trials"});
    for (BasisKind kind : p.bases) {
        const ModulationBasis basis = build_basis(kind, p.n, p.basis_params);
        const SensingStats s = eisl(basis, source, c.trials, p.mode, eisl_seed, p.exclude_lags);
        summary.add_row({to_string(kind), s.mean, s.variance, std::sqrt(s.variance / static_cast<double>(s.trials)),
                         s.ci_halfwidth, as_int(s.trials)});

        const AcfProfile prof = expected_acf_profile(basis, source, c.trials, p.mode, profile_seed);
        CsvTable lags({"lag_or_range", "mean", "variance"});
        for (Eigen::Index i = 0; i < prof.mean.size(); ++i)
            lags.add_row({static_cast<std::int64_t>(prof.lag_at(i)), prof.mean[i], prof.variance[i]});
        const std::string stem = "acf_" + to_string(kind);
        out.write_csv(stem + ".csv", lags);
        out.write_json(stem + ".json", {{"trials", c.trials},
                                        {"seed", profile_seed},
                                        {"basis", to_string(kind)},
                                        {"basis_params", basis_descriptor(basis)},
                                        {"constellation", source.label()},
                                        {"mode", to_string(p.mode)}});
    }
    out.write_csv("eisl.csv", summary);
    out.write_json("eisl.json", {{"trials", c.trials},
                                 {"seed", eisl_seed},
                                 {"N", p.n},
                                 {"constellation", source.label()},
                                 {"mode", to_string(p.mode)},
                                 {"exclude_lags", p.exclude_lags}});
    return true;
}

void write_pulse(OutputSet& out, const std::string& stem, const PulseSpec& pulse) {
    CsvTable taps({"tau", "p"});
    const double dt = pulse.symbol_period / static_cast<double>(pulse.oversampling);
    const auto center = static_cast<long>(pulse.center_tap());
    for (Eigen::Index k = 0; k < pulse.taps.size(); ++k)
        taps.add_row({static_cast<double>(static_cast<long>(k) - center) * dt, pulse.taps[k]});
    out.write_csv(stem + "_taps.csv", taps);

    CsvTable spec({"f", "G"});
    for (Eigen::Index k = 0; k < pulse.freq.size(); ++k) spec.add_row({pulse.freq[k], pulse.spectrum[k]});
    out.write_csv(stem + "_spectrum.csv", spec);
}

bool run_pulse(const PulseParams& p, OutputSet& out) {
    const double t = p.symbol_period;
    const double begin = p.region_t[0] * t, end = p.region_t[1] * t;
    const PulseDesign d = design_pulse(t, p.beta, p.oversampling, p.span, begin, end, p.iters, p.tol);
    const PulseSpec rrc = rrc_pulse(t, p.beta, p.oversampling, p.span);
    write_pulse(out, "designed", d.pulse);
    write_pulse(out, "rrc", rrc);

    CsvTable hist({"iteration", "region_isl"});
    for (std::size_t i = 0; i < d.objective_history.size(); ++i) hist.add_row({as_int(i), d.objective_history[i]});
    out.write_csv("design_history.csv", hist);

    out.write_json("design_report.json", {{"beta", p.beta},
                                          {"T", t},
                                          {"K", p.oversampling},
                                          {"span", p.span},
                                          {"region", {begin, end}},
                                          {"islr_db_before", d.islr_before_db},
                                          {"islr_db_after", d.islr_after_db},
                                          {"iterations", d.iterations},
                                          {"converged", d.converged},
                                          {"nyquist_defect", nyquist_defect(d.pulse)}});
    return d.converged;
}

bool run_range(const Common& c, const RangeParams& p, OutputSet& out) {
    const SymbolSource source = symbol_source(p.constellation);
    const double t = p.symbol_period;
    const double fs = static_cast<double>(p.oversampling) / t;

    RangeScene scene;
    scene.sample_rate = fs;
    scene.noise_power = p.noise_power;
    for (const auto& st : p.targets) scene.targets.push_back({st.range_m, cplx(std::pow(10.0, st.gain_db / 20.0), 0.0)});
    const auto strongest = *std::max_element(p.targets.begin(), p.targets.end(),
                                             [](const auto& a, const auto& b) { return a.gain_db < b.gain_db; });

    const double tau_begin = 2.0 * (p.region_m[0] - strongest.range_m) / kSpeedOfLight;
    const double tau_end = 2.0 * (p.region_m[1] - strongest.range_m) / kSpeedOfLight;
    const PulseDesign design =
        design_pulse(t, p.beta, p.oversampling, p.span, tau_begin, tau_end, p.design_iters, p.design_tol);
    const PulseSpec rrc = rrc_pulse(t, p.beta, p.oversampling, p.span);

    WeakTargetOptions opt;
    opt.region_begin_m = p.region_m[0];
    opt.region_end_m = p.region_m[1];
    opt.tolerance_bins = p.tolerance_bins;
    opt.trials = c.trials;
    opt.seed = child_seed(c.seed, "range-scene", 0);  // shared by every comparison

    std::vector<ModulationBasis> bases;
    for (BasisKind k : p.bases) bases.push_back(build_basis(k, p.n));

    CsvTable detection({"basis", "pulse", "detect_prob", "trials"});
    CsvTable improvement({"comparison", "detect_a", "detect_b", "improvement", "trials"});
    const auto pulses = std::vector<std::pair<std::string, const PulseSpec*>>{{"RRC", &rrc}, {"designed", &design.pulse}};

    for (const auto& basis : bases) {
        const auto cmp = weak_target_improvement(scene, rrc, design.pulse, basis, source, opt);
        detection.add_row({to_string(basis.kind()), std::string("RRC"), cmp.detect_a, as_int(c.trials)});
        detection.add_row({to_string(basis.kind()), std::string("designed"), cmp.detect_b, as_int(c.trials)});
        improvement.add_row({to_string(basis.kind()) + ": RRC -> designed", cmp.detect_a, cmp.detect_b,
                             cmp.improvement, as_int(c.trials)});
    }
    for (std::size_t i = 0; i < bases.size(); ++i)
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            const auto cmp = weak_target_improvement(scene, RangingSetup{&bases[i], &rrc}, RangingSetup{&bases[j], &rrc},
                                                     source, opt);
            improvement.add_row({"RRC: " + to_string(bases[i].kind()) + " -> " + to_string(bases[j].kind()),
                                 cmp.detect_a, cmp.detect_b, cmp.improvement, as_int(c.trials)});
        }
    out.write_csv("detection.csv", detection);
    out.write_csv("improvement.csv", improvement);

    // mean range profiles on the common noise and symbol draws
    const std::uint64_t prof_seed = child_seed(c.seed, "range-scene", 1);
    for (const auto& basis : bases)
        for (const auto& [name, pulse] : pulses) {
            auto profiles = run_trials(p.profile_trials, prof_seed, [&](Rng& rng, std::size_t) {
                const CVector x = modulate(basis, source.draw(basis.n(), rng)).time_samples;
                return range_profile(x, scene, pulse, rng);
            });
            const Eigen::Index nb = profiles.front().power.size();
            RVector mean = RVector::Zero(nb), sq = RVector::Zero(nb);
            for (const auto& pr : profiles) {
                mean += pr.power;
                sq += pr.power.cwiseAbs2();
            }
            const double m = static_cast<double>(profiles.size());
            mean /= m;
            CsvTable table({"lag_or_range", "mean", "variance"});
            for (Eigen::Index k = 0; k < nb; ++k) {
                const double var = m > 1 ? std::max(0.0, (sq[k] - m * mean[k] * mean[k]) / (m - 1.0)) : 0.0;
                table.add_row({profiles.front().range_m[k], mean[k], var});
            }
            out.write_csv("profile_" + to_string(basis.kind()) + "_" + name + ".csv", table);
        }

    write_pulse(out, "designed", design.pulse);
    out.write_json("scene.json", {{"sample_rate", fs},
                                  {"T", t},
                                  {"noise_power", p.noise_power},
                                  {"region_m", p.region_m},
                                  {"design_region_s", {tau_begin, tau_end}},
                                  {"islr_db_rrc", design.islr_before_db},
                                  {"islr_db_designed", design.islr_after_db},
                                  {"design_converged", design.converged},
                                  {"constellation", source.label()},
                                  {"seed", opt.seed},
                                  {"profile_seed", prof_seed}});
    return design.converged;
}

bool run_pcs(const PcsParams& p, OutputSet& out) {
    const Constellation base = make_standard(p.base);
    const AwgnChannel ch = AwgnChannel::from_snr_db(p.snr_db);
    const auto frontier = tradeoff_frontier(base, ch, p.kappas, p.tolerance, p.max_iters, p.quadrature_order);

    CsvTable table({"kappa_target", "kappa_achieved", "mi_bits", "iterations", "converged", "cap_attainable"});
    bool all_converged = true;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        const auto& f = frontier[i];
        all_converged = all_converged && f.result.converged;
        table.add_row({f.kappa_target, f.result.achieved_kurtosis, f.result.mi_bits, as_int(f.result.iterations),
                       std::int64_t{f.result.converged ? 1 : 0}, std::int64_t{f.result.cap_attainable ? 1 : 0}});
        json dist;
        to_json(dist, base.with_probs(f.result.probs));
        out.write_json("shaped_" + std::to_string(i) + ".json", dist);
    }
    out.write_csv("frontier.csv", table);
    out.write_json("frontier.json", {{"base", p.base},
                                     {"snr_db", p.snr_db},
                                     {"uniform_mi_bits", mutual_information(base, ch, MiMethod::quadrature, p.quadrature_order)},
                                     {"min_kurtosis", min_kurtosis(base)}});
    return all_converged;
}

bool run_precoding(const Common& c, const PrecodingParams& p, OutputSet& out) {
    const SymbolSource source = symbol_source(p.symbols);
    const auto n = static_cast<Eigen::Index>(p.n_tx);

    Rng ch_rng(child_seed(c.seed, "precoding", 0));
    CMatrix h(static_cast<Eigen::Index>(p.n_cu), n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = ch_rng.complex_normal();
    const CommLink link{h, p.comm_noise_var, p.rate_floor};
    const double capacity = link_capacity(link, p.power);
    const CMatrix baseline = std::sqrt(p.power / static_cast<double>(p.n_tx)) * CMatrix::Identity(n, n);

    CsvTable table({"L", "n_tx", "scheme", "else_mean", "else_ci", "rate_bits"});
    json problems = json::array();
    for (std::size_t li = 0; li < p.frame_lengths.size(); ++li) {
        const std::size_t len = p.frame_lengths[li];
        TirModel model;
        model.n_tx = p.n_tx;
        model.n_rx = p.n_rx;
        model.noise_var = p.noise_var;
        model.prior_var = p.prior_var;
        model.frame_len = len;
        const std::uint64_t eval_seed = child_seed(c.seed, "precoding", 1000 + li);  // paired across schemes

        // DDP adapts to each frame, so its error is sampled frame by frame
        auto ddp = run_trials(c.trials, eval_seed, [&](Rng& rng, std::size_t) {
            const CMatrix s = source.draw(p.n_tx, len, rng);
            const CMatrix w = ddp_precoder(s, p.power, p.n_tx);
            return std::make_pair(instantaneous_error(w * s, model, p.metric), comm_rate(w, link));
        });
        std::vector<double> ddp_err, ddp_rate;
        for (const auto& [e, r] : ddp) {
            ddp_err.push_back(e);
            ddp_rate.push_back(r);
        }
        const SensingStats ddp_stats = summarize(ddp_err, kInf, eval_seed);
        const double ddp_rate_mean = std::accumulate(ddp_rate.begin(), ddp_rate.end(), 0.0) / static_cast<double>(ddp_rate.size());
        table.add_row({as_int(len), as_int(p.n_tx), std::string("DDP"), ddp_stats.mean, ddp_stats.ci_halfwidth, ddp_rate_mean});

        DipOptions opt;
        opt.sa_trials = p.sa_trials;
        opt.iters = p.iters;
        opt.seed = child_seed(c.seed, "precoding", 2000 + li);
        const DipResult dip = dip_precoder(model, source, p.power, p.metric, link, opt);
        const ErgodicStats dip_stats = ergodic_error(dip.precoder, model, source, p.metric, c.trials, eval_seed);
        table.add_row({as_int(len), as_int(p.n_tx), std::string("DIP"), dip_stats.stats.mean, dip_stats.stats.ci_halfwidth,
                       dip.rate});

        const ErgodicStats base_stats = ergodic_error(baseline, model, source, p.metric, c.trials, eval_seed);
        table.add_row({as_int(len), as_int(p.n_tx), std::string("orthogonal-baseline"), base_stats.stats.mean,
                       base_stats.stats.ci_halfwidth, comm_rate(baseline, link)});

        problems.push_back({{"L", len},
                            {"n_tx", p.n_tx},
                            {"n_rx", p.n_rx},
                            {"noise_var", p.noise_var},
                            {"metric", to_string(p.metric)},
                            {"symbols", source.label()},
                            {"eval_seed", eval_seed},
                            {"dip_seed", opt.seed},
                            {"dip_sample_average", dip.objective},
                            {"dip_iterations", dip.iterations},
                            {"singular_frames", {{"DIP", dip_stats.singular_frames}, {"baseline", base_stats.singular_frames}}}});
    }
    out.write_csv("results.csv", table);
    out.write_json("problems.json", {{"power", p.power},
                                     {"n_cu", p.n_cu},
                                     {"comm_noise_var", p.comm_noise_var},
                                     {"rate_floor", p.rate_floor},
                                     {"capacity_bits", capacity},
                                     {"frames", problems}});
    return true;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::vector<Diagnostic> validate_config(std::string_view config_text) {
    std::vector<Diagnostic> diags;
    parse_config(config_text, {}, diags);
    return diags;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

json manifest_json(const RunManifest& m) {
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    return {{"experiment", m.experiment},
            {"config_hash", m.config_hash},
            {"toolkit_version", m.toolkit_version},
            {"started_utc", m.started_utc},
            {"finished_utc", m.finished_utc},
            {"seed", m.seed},
            {"status", m.status},
            {"outputs", outputs}};
}

RunManifest run_experiment(std::string_view config_text, const RunOverrides& overrides) {
    std::vector<Diagnostic> diags;
    auto parsed = parse_config(config_text, overrides, diags);
    if (!parsed) throw ConfigError(std::move(diags));
    const Common& c = parsed->common;

    RunManifest m;
    m.experiment = c.experiment;
    m.config_hash = config_hash(parsed->canonical);
    m.seed = c.seed;
    m.output_dir = c.output_dir;
    m.started_utc = utc_now();

    OutputSet out(c.output_dir);
    bool converged = true;
    try {
        converged = std::visit(
            [&](const auto& p) -> bool {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, AcfParams>) return run_acf(c, p, out);
                if constexpr (std::is_same_v<P, PulseParams>) return run_pulse(p, out);
                if constexpr (std::is_same_v<P, RangeParams>) return run_range(c, p, out);
                if constexpr (std::is_same_v<P, PcsParams>) return run_pcs(p, out);
                if constexpr (std::is_same_v<P, PrecodingParams>) return run_precoding(c, p, out);
            },
            parsed->params);
    } catch (const Infeasible& e) {
        throw Infeasible(c.experiment + ": " + e.what(), e.achieved());
    } catch (const NotConverged& e) {
        throw NotConverged(c.experiment + ": " + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw Error(c.experiment + ": " + e.what());
    }

    m.status = converged ? "success" : "not-converged";
    m.outputs = out.records();
    m.finished_utc = utc_now();
    write_atomic(c.output_dir / "manifest.json", manifest_json(m).dump(2) + "\n");
    return m;
}

ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return ExitCode::invalid_config;
    if (dynamic_cast<const Infeasible*>(&e)) return ExitCode::infeasible;
    if (dynamic_cast<const NotConverged*>(&e)) return ExitCode::not_converged;
    return ExitCode::failure;
}

}  // namespace isac
