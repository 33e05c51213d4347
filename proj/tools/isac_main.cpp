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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isac/experiment.hpp"
#include "isac/io.hpp"

namespace {

int code(isac::ExitCode c) { return static_cast<int>(c); }

int cmd_run(const std::string& config_path, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed) {
    std::string text;
    try {
        text = isac::read_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(isac::ExitCode::invalid_config);
    }
    isac::RunOverrides ov;
    if (out) ov.output_dir = *out;
    ov.seed = seed;
    try {
        const auto m = isac::run_experiment(text, ov);
        std::cout << m.experiment << ": " << m.status << ", " << m.outputs.size() << " outputs in "
                  << m.output_dir.string() << "\n";
        return code(m.exit_code());
    } catch (const isac::ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << "invalid config: " << isac::to_string(d) << "\n";
        return code(isac::ExitCode::invalid_config);
    } catch (const isac::Infeasible& e) {
        std::cerr << "infeasible: " << e.what();
        if (e.achieved()) std::cerr << " (best achievable " << isac::format_double(*e.achieved()) << ")";
        std::cerr << "\n";
        return code(isac::ExitCode::infeasible);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(isac::exit_code_for(e));
    }
}

int cmd_validate(const std::string& config_path) {
    std::string text;
    try {
        text = isac::read_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(isac::ExitCode::invalid_config);
    }
    const auto diags = isac::validate_config(text);
    for (const auto& d : diags) std::cout << isac::to_string(d) << "\n";
    if (diags.empty()) std::cout << "ok\n";
    return diags.empty() ? 0 : code(isac::ExitCode::invalid_config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isac: sensing performance under random communication signaling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(isac::kToolkitVersion));

    std::string run_config, validate_config;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
    run->add_option("config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory, overrides output_dir");
    run->add_option("--seed", seed, "Root seed, overrides seed");

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", validate_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

    auto* list = app.add_subcommand("list-experiments", "List experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(isac::ExitCode::invalid_config);
    }

    if (*run) return cmd_run(run_config, out_dir, seed);
    if (*validate) return cmd_validate(validate_config);
    if (*list) {
        for (const auto& name : isac::experiment_names()) std::cout << name << "\n";
        return 0;
    }
    return 0;
}
