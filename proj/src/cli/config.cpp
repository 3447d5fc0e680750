// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace spinrsp::cli {

namespace {

struct OptionDef {
    const char* name;
    const char* help;
};

// Flag names double as config-file keys.
const std::vector<OptionDef>& option_catalog() {
    static const std::vector<OptionDef> catalog = {
        {"n", "atom number N (mean N for fluctuation)"},
        {"tau", "squeezing time J t / hbar (default: optimal time for N)"},
        {"theta", "polar angle, radians or pi:<factor>"},
        {"phi", "azimuth, radians or pi:<factor>"},
        {"k", "measurement outcome"},
        {"k-cut", "post-selection cutoff, 0 <= k-cut < N/2"},
        {"n-theta", "theta grid nodes over [0, pi]"},
        {"n-phi", "phi grid nodes over [0, 2pi)"},
        {"tau-max", "end of the time scan (default 0.5)"},
        {"steps", "time scan intervals (default 500)"},
        {"source", "protocol | ideal (default protocol)"},
        {"sigma0", "Gaussian width of the atom number (default 2 sqrt(N))"},
        {"truncation", "support half-width in units of sigma0 (default 4)"},
        {"rule", "high (k = N_A) | low (k = 0) | fixed (uses --k) (default high)"},
        {"output", "output file, - for stdout (default -)"},
        {"format", "csv | json"},
    };
    return catalog;
}

struct SubcommandDef {
    Subcommand id;
    const char* name;
    const char* help;
    std::vector<std::string> options;
    std::vector<std::string> required;
};

const std::vector<SubcommandDef>& subcommand_catalog() {
    static const std::vector<SubcommandDef> catalog = {
        {Subcommand::kOptimalTime, "optimal-time", "optimal 2A2S time and EPR fidelity",
         {"n", "output", "format"}, {"n"}},
        {Subcommand::kSqueeze, "squeeze", "fidelity and pair variances over time",
         {"n", "tau-max", "steps", "output", "format"}, {"n"}},
        {Subcommand::kProtocol, "protocol", "per-outcome probabilities, spins and errors",
         {"n", "tau", "theta", "phi", "output", "format"}, {"n", "theta", "phi"}},
        {Subcommand::kProbDist, "prob-dist", "outcome distribution versus theta (grid default 61)",
         {"n", "tau", "theta", "n-theta", "output", "format"}, {"n"}},
        {Subcommand::kSpinSweep, "spin-sweep", "Bob's spins over a (theta, phi) grid (61 x 61)",
         {"n", "tau", "k", "phi", "n-theta", "n-phi", "output", "format"}, {"n"}},
        {Subcommand::kWignerMap, "wigner-map", "Wigner function of Bob's state (grid 121 x 241)",
         {"n", "tau", "theta", "phi", "k", "source", "n-theta", "n-phi", "output", "format"},
         {"n", "theta", "phi", "k"}},
        {Subcommand::kErrorSweep, "error-sweep", "average and post-selected error over a grid",
         {"n", "tau", "theta", "phi", "k-cut", "n-theta", "n-phi", "output", "format"}, {"n"}},
        {Subcommand::kFluctuation, "fluctuation", "spins under atom-number fluctuations (phi -pi/4)",
         {"n", "tau", "sigma0", "truncation", "rule", "k", "phi", "n-theta", "output", "format"}, {"n"}},
    };
    return catalog;
}

const char* option_help(const std::string& name) {
    for (const auto& def : option_catalog()) {
        if (name == def.name) return def.help;
    }
    return "";
}

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::map<std::string, std::string> parse_config_file(const std::string& contents) {
    std::map<std::string, std::string> entries;
    std::istringstream stream(contents);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_number) + ": expected key=value");
        }
        std::string key = trim(body.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty()) {
            throw UsageError("config line " + std::to_string(line_number) + ": empty key");
        }
        if (!entries.emplace(key, trim(body.substr(eq + 1))).second) {
            throw UsageError("config key '" + key + "' given twice");
        }
    }
    return entries;
}

int parse_int(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(text, &used);
    } catch (const std::exception&) {
        throw UsageError("--" + field + ": '" + text + "' is not an integer");
    }
    if (used != text.size() || value < std::numeric_limits<int>::min() ||
        value > std::numeric_limits<int>::max()) {
        throw UsageError("--" + field + ": '" + text + "' is not an integer");
    }
    return static_cast<int>(value);
}

double parse_real(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("--" + field + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw UsageError("--" + field + ": '" + text + "' is not a finite number");
    }
    return value;
}

struct AppBundle {
    std::unique_ptr<CLI::App> app;
    // Storage for each subcommand's options, keyed by (subcommand, option).
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, CLI::Option*>> handles;
};

std::unique_ptr<AppBundle> build_app() {
    auto bundle = std::make_unique<AppBundle>();
    bundle->app = std::make_unique<CLI::App>("Remote state preparation between spin ensembles", "spinrsp");
    auto& app = *bundle->app;
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");
    app.add_option("--config", "flat key=value file with option defaults");
    for (const auto& def : subcommand_catalog()) {
        CLI::App* sub = app.add_subcommand(def.name, def.help);
        auto& store = bundle->values[def.name];
        for (const auto& opt : def.options) {
            store[opt];
        }
        for (const auto& opt : def.options) {
            bundle->handles[def.name][opt] = sub->add_option("--" + opt, store[opt], option_help(opt));
        }
    }
    return bundle;
}

}  // namespace

std::string subcommand_name(Subcommand sub) {
    for (const auto& def : subcommand_catalog()) {
        if (def.id == sub) return def.name;
    }
    return "unknown";
}

std::string usage_text() {
    const auto bundle = build_app();
    std::string text = bundle->app->help("", CLI::AppFormatMode::All);
    text += "\nAngles accept radians or pi:<factor>. Workers: SPINRSP_WORKERS.\n";
    return text;
}

double parse_angle(const std::string& text, const std::string& field) {
    if (text.rfind("pi:", 0) == 0) {
        return std::numbers::pi * parse_real(text.substr(3), field);
    }
    return parse_real(text, field);
}

ExperimentConfig parse_config(const std::vector<std::string>& argv,
                              const std::optional<std::string>& config_contents) {
    // Name the offending flag before CLI11 lumps it into a generic message.
    for (const auto& candidate : subcommand_catalog()) {
        if (argv.empty() || argv.front() != candidate.name) continue;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            const std::string& token = argv[i];
            if (token.rfind("--", 0) != 0 || token == "--help") continue;
            const std::string flag = token.substr(2, token.find('=') - 2);
            if (std::find(candidate.options.begin(), candidate.options.end(), flag) == candidate.options.end()) {
                throw UsageError(std::string(candidate.name) + " does not accept --" + flag);
            }
        }
    }

    const auto bundle = build_app();
    auto& app = *bundle->app;

    // CLI11 consumes arguments from the back.
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(usage_text());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(usage_text());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const SubcommandDef* def = nullptr;
    for (const auto& candidate : subcommand_catalog()) {
        if (app.got_subcommand(candidate.name)) def = &candidate;
    }
    if (def == nullptr) throw UsageError("a subcommand is required");

    // Command line first, then file entries for options left unset.
    std::map<std::string, std::string> merged;
    for (const auto& opt : def->options) {
        if (bundle->handles.at(def->name).at(opt)->count() > 0) {
            merged[opt] = bundle->values.at(def->name).at(opt);
        }
    }
    if (config_contents) {
        for (const auto& [key, value] : parse_config_file(*config_contents)) {
            const bool allowed = std::find(def->options.begin(), def->options.end(), key) != def->options.end();
            if (!allowed) {
                throw UsageError("config key '" + key + "' is not accepted by " + def->name);
            }
            merged.emplace(key, value);
        }
    }
    for (const auto& req : def->required) {
        if (!merged.contains(req)) throw UsageError(std::string(def->name) + ": --" + req + " is required");
    }

    ExperimentConfig config;
    config.subcommand = def->id;
    config.echo = merged;
    if (config.subcommand == Subcommand::kOptimalTime) config.format = OutputFormat::kJson;
    if (config.subcommand == Subcommand::kWignerMap) config.grid = {121, 241};

    auto get = [&](const std::string& key) -> const std::string* {
        auto it = merged.find(key);
        return it == merged.end() ? nullptr : &it->second;
    };

    config.n_atoms = parse_int(*get("n"), "n");
    const int n = config.n_atoms;
    const int min_atoms = config.subcommand == Subcommand::kOptimalTime ? 2 : 1;
    if (n < min_atoms) throw UsageError("--n must be >= " + std::to_string(min_atoms));

    if (auto v = get("tau")) {
        config.tau = parse_real(*v, "tau");
        if (*config.tau < 0.0) throw UsageError("--tau must be non-negative");
    }
    if (auto v = get("theta")) config.theta = parse_angle(*v, "theta");
    if (auto v = get("phi")) config.phi = parse_angle(*v, "phi");
    if (auto v = get("k")) {
        config.k = parse_int(*v, "k");
        if (*config.k < 0 || (config.subcommand != Subcommand::kFluctuation && *config.k > n)) {
            throw UsageError("--k must lie in [0, N]");
        }
    }
    if (auto v = get("k-cut")) {
        config.k_cut = parse_int(*v, "k-cut");
        if (*config.k_cut < 0 || 2 * *config.k_cut >= n) {
            throw UsageError("--k-cut must satisfy 0 <= k-cut < N/2 (N = " + std::to_string(n) + ")");
        }
    }
    if (auto v = get("n-theta")) config.grid.n_theta = parse_int(*v, "n-theta");
    if (auto v = get("n-phi")) config.grid.n_phi = parse_int(*v, "n-phi");
    if (config.grid.n_theta < 2 || config.grid.n_phi < 1) {
        throw UsageError("grid needs --n-theta >= 2 and --n-phi >= 1");
    }
    if (config.subcommand == Subcommand::kWignerMap && config.grid.n_theta < 3) {
        throw UsageError("wigner-map needs --n-theta >= 3");
    }
    if (auto v = get("tau-max")) {
        config.tau_max = parse_real(*v, "tau-max");
        if (!(config.tau_max > 0.0)) throw UsageError("--tau-max must be positive");
    }
    if (auto v = get("steps")) {
        config.steps = parse_int(*v, "steps");
        if (config.steps < 1) throw UsageError("--steps must be >= 1");
    }
    if (auto v = get("source")) {
        if (*v == "protocol") {
            config.source = WignerSource::kProtocol;
        } else if (*v == "ideal") {
            config.source = WignerSource::kIdeal;
        } else {
            throw UsageError("--source must be protocol or ideal, got '" + *v + "'");
        }
    }
    if (auto v = get("output")) {
        if (v->empty()) throw UsageError("--output must not be empty");
        config.output_path = *v;
    }
    if (auto v = get("format")) {
        if (*v == "csv") {
            config.format = OutputFormat::kCsv;
        } else if (*v == "json") {
            config.format = OutputFormat::kJson;
        } else {
            throw UsageError("--format must be csv or json, got '" + *v + "'");
        }
    }

    if (config.subcommand == Subcommand::kFluctuation) {
        FluctuationSpec fspec;
        fspec.mean_atoms = n;
        fspec.sigma0 = 2.0 * std::sqrt(static_cast<double>(n));
        if (auto v = get("sigma0")) fspec.sigma0 = parse_real(*v, "sigma0");
        if (auto v = get("truncation")) fspec.truncation = parse_real(*v, "truncation");
        if (!(fspec.sigma0 > 0.0)) throw UsageError("--sigma0 must be positive");
        if (!(fspec.truncation > 0.0)) throw UsageError("--truncation must be positive");
        const std::string rule = get("rule") ? *get("rule") : "high";
        if (rule == "high") {
            fspec.rule = OutcomeRule::kExtremalHigh;
        } else if (rule == "low") {
            fspec.rule = OutcomeRule::kExtremalLow;
        } else if (rule == "fixed") {
            fspec.rule = OutcomeRule::kFixed;
            if (!config.k) throw UsageError("--rule fixed needs --k");
            fspec.fixed_k = *config.k;
        } else {
            throw UsageError("--rule must be high, low or fixed, got '" + rule + "'");
        }
        if (config.k && fspec.rule != OutcomeRule::kFixed) {
            throw UsageError("--k is only used with --rule fixed");
        }
        if (!config.phi) config.phi = -std::numbers::pi / 4.0;
        config.fluctuation = fspec;
    }
    return config;
}

}  // namespace spinrsp::cli
