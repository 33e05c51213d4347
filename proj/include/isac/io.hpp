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

// Artifact plumbing: byte-stable number formatting, CSV tables, atomic writes
// and content digests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace isac {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

using CsvCell = std::variant<double, std::int64_t, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<CsvCell> cells);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }
    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<CsvCell>> rows_;
};

// Writes through a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

}  // namespace isac
