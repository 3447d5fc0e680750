// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spinrsp/cli/config.hpp"

namespace spinrsp::cli {

/// Empty cells (monostate) mark undefined values: blank in CSV, null in JSON.
using Cell = std::variant<std::monostate, std::int64_t, double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// A single-row table written as one JSON object instead of a row block.
    bool single_record = false;
};

/// Floats use 12 significant digits in both formats.
std::string format_real(double value);

std::string render_csv(const Table& table);
std::string render_json(const Table& table, const std::string& subcommand);

struct FileChecksum {
    std::string path;
    std::string sha256;
};

/// Renders and writes atomically (temporary file, then rename). "-" writes to
/// stdout and reports the checksum of the rendered bytes. Throws IoError.
FileChecksum write_output(const Table& table, OutputFormat format, const std::string& path,
                          const std::string& subcommand);

/// Atomic text write used for outputs and manifests.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string sha256_hex(const std::string& bytes);

}  // namespace spinrsp::cli
