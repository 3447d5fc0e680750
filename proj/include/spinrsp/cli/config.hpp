// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinrsp/rsp_protocol.hpp"

namespace spinrsp::cli {

/// Bad command line or config file; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be written or an input file could not be read; exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --help was given; carries the text to print.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

enum class Subcommand {
    kOptimalTime,
    kSqueeze,
    kProtocol,
    kProbDist,
    kSpinSweep,
    kWignerMap,
    kErrorSweep,
    kFluctuation,
};

enum class OutputFormat { kCsv, kJson };

enum class WignerSource { kProtocol, kIdeal };

struct GridSpec {
    int n_theta = 61;
    int n_phi = 61;
};

struct ExperimentConfig {
    Subcommand subcommand = Subcommand::kOptimalTime;
    int n_atoms = 0;
    std::optional<double> tau;
    std::optional<double> theta;
    std::optional<double> phi;
    std::optional<int> k;
    std::optional<int> k_cut;
    GridSpec grid;
    double tau_max = 0.5;
    int steps = 500;
    WignerSource source = WignerSource::kProtocol;
    std::optional<FluctuationSpec> fluctuation;
    std::string output_path = "-";  ///< "-" writes to stdout without a manifest
    OutputFormat format = OutputFormat::kCsv;
    /// Every option that was set, by flag name, as given (file or command line).
    std::map<std::string, std::string> echo;
};

std::string subcommand_name(Subcommand sub);

/// Parses `argv` (without the program name). `config_contents` holds the text
/// of a flat key=value file; command-line flags win over file entries, and a
/// file key the subcommand does not accept is a usage error.
ExperimentConfig parse_config(const std::vector<std::string>& argv,
                              const std::optional<std::string>& config_contents = std::nullopt);

/// Help text listing every subcommand with its options and defaults.
std::string usage_text();

/// Radians, or a multiple of pi written as "pi:<factor>".
double parse_angle(const std::string& text, const std::string& field);

}  // namespace spinrsp::cli
