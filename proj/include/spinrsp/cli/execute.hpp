// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinrsp/cli/config.hpp"
#include "spinrsp/cli/output.hpp"

namespace spinrsp::cli {

std::string library_version();

struct ExperimentResult {
    Table table;
    std::optional<double> tau;  ///< squeezing time used, when one applies
};

/// Runs the pipeline for `config` without touching the filesystem.
/// Inner DomainErrors surface as UsageError and numerical failures as
/// NumericalError, both prefixed with the subcommand name.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct RunManifest {
    std::string subcommand;
    std::string version;
    std::map<std::string, std::string> config;
    std::optional<double> tau;
    double wall_time_seconds = 0.0;
    std::vector<FileChecksum> outputs;
};

std::string render_manifest(const RunManifest& manifest);

/// run_experiment, then write the table and, for file outputs,
/// `<output>.manifest.json` next to it.
RunManifest execute(const ExperimentConfig& config);

/// Full command-line entry point: returns the process exit code.
int run_main(const std::vector<std::string>& args);

}  // namespace spinrsp::cli
