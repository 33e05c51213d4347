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

// Batch experiments: strict JSON configs, the five pipelines and the run
// manifest that ties every artifact to a config hash.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "isac/types.hpp"

namespace isac {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ExitCode : int { success = 0, failure = 1, invalid_config = 2, infeasible = 3, not_converged = 4 };

struct Diagnostic {
    std::string path;  // e.g. "kappas[0]", "" for the document itself
    std::string message;
};

std::string to_string(const Diagnostic& d);

class ConfigError : public InvalidArgument {
  public:
    explicit ConfigError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  private:
    std::vector<Diagnostic> diagnostics_;
};

std::vector<std::string> experiment_names();

// Full schema and cross-field checks; an empty list means run() will accept the text.
std::vector<Diagnostic> validate_config(std::string_view config_text);

struct RunOverrides {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> seed;
};

struct OutputRecord {
    std::string file;  // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunManifest {
    std::string experiment;
    std::string config_hash;  // SHA-256 of the canonical config, output_dir excluded
    std::string toolkit_version = kToolkitVersion;
    std::string started_utc;
    std::string finished_utc;
    std::uint64_t seed = 0;
    std::string status = "success";  // or "not-converged"
    std::filesystem::path output_dir;
    std::vector<OutputRecord> outputs;

    ExitCode exit_code() const { return status == "success" ? ExitCode::success : ExitCode::not_converged; }
};

nlohmann::json manifest_json(const RunManifest& m);

// Key order and whitespace do not affect the hash.
std::string config_hash(const nlohmann::json& config);

// Throws ConfigError before touching the filesystem when the config is invalid.
// Pipeline failures (Infeasible, NotConverged, ...) propagate with context and
// leave no manifest behind.
RunManifest run_experiment(std::string_view config_text, const RunOverrides& overrides = {});

// Maps an in-flight exception to the CLI exit code.
ExitCode exit_code_for(const std::exception& e);

}  // namespace isac
