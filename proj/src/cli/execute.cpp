// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/cli/execute.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "spinrsp/errors.hpp"
#include "spinrsp/parallel.hpp"
#include "spinrsp/rsp_protocol.hpp"
#include "spinrsp/squeezing.hpp"
#include "spinrsp/wigner.hpp"

#ifndef SPINRSP_VERSION
#define SPINRSP_VERSION "0.0.0"
#endif

namespace spinrsp::cli {

namespace {

constexpr double kPi = std::numbers::pi;

using Row = std::vector<Cell>;

Cell real(double v) { return v; }
Cell integer(int v) { return static_cast<std::int64_t>(v); }

std::vector<double> theta_axis(const ExperimentConfig& config) {
    if (config.theta) return {*config.theta};
    std::vector<double> axis;
    const int n = config.grid.n_theta;
    for (int i = 0; i < n; ++i) axis.push_back(kPi * i / (n - 1));
    return axis;
}

std::vector<double> phi_axis(const ExperimentConfig& config) {
    if (config.phi) return {*config.phi};
    std::vector<double> axis;
    const int n = config.grid.n_phi;
    for (int j = 0; j < n; ++j) axis.push_back(2.0 * kPi * j / n);
    return axis;
}

double resolve_tau(const ExperimentConfig& config) {
    return config.tau ? *config.tau : find_optimal_time(config.n_atoms).tau;
}

DiagonalPairState squeezed_resource(int n, double tau) { return apply_frame_rotation(evolve_2a2s(n, tau)); }

// Rows for every (theta, phi) point, computed in parallel and concatenated in grid order.
template <typename PointRows>
std::vector<Row> sweep(const std::vector<double>& thetas, const std::vector<double>& phis, PointRows&& point) {
    std::vector<std::vector<Row>> blocks(thetas.size() * phis.size());
    parallel_for(blocks.size(), [&](std::size_t idx) {
        blocks[idx] = point(thetas[idx / phis.size()], phis[idx % phis.size()]);
    });
    std::vector<Row> rows;
    for (auto& block : blocks) {
        for (auto& row : block) rows.push_back(std::move(row));
    }
    return rows;
}

Table optimal_time_table(const ExperimentConfig& config) {
    const OptimalTime opt = find_optimal_time(config.n_atoms);
    Table table{{"n", "tau_opt", "fidelity"}, {}, true};
    table.rows.push_back({integer(config.n_atoms), real(opt.tau), real(opt.fidelity)});
    return table;
}

Table squeeze_table(const ExperimentConfig& config) {
    const int n = config.n_atoms;
    const PairEvolver evolver(n);
    const DiagonalPairState target = epr_minus(n);
    Table table{{"tau", "fidelity", "var_xp", "var_ym", "var_zm"}, {}, false};
    std::vector<Row> rows(static_cast<std::size_t>(config.steps) + 1);
    parallel_for(rows.size(), [&](std::size_t i) {
        const double tau = config.tau_max * static_cast<double>(i) / config.steps;
        const SqueezingRun run{n, tau, apply_frame_rotation(evolver.evolve(tau)), true};
        const VarianceTriple v = pair_variances(run);
        rows[i] = {real(tau), real(fidelity(run.state, target)), real(v.var_xp), real(v.var_ym), real(v.var_zm)};
    });
    table.rows = std::move(rows);
    return table;
}

Row outcome_row(const ProtocolOutcome& outcome, const std::optional<double>& error) {
    Row row{integer(outcome.k), real(outcome.probability)};
    if (outcome.defined()) {
        row.insert(row.end(), {real(outcome.bob_spins.x), real(outcome.bob_spins.y), real(outcome.bob_spins.z)});
    } else {
        row.insert(row.end(), {Cell{}, Cell{}, Cell{}});
    }
    row.push_back(error ? real(*error) : Cell{});
    return row;
}

Table protocol_table(const ExperimentConfig& config, double tau) {
    const RotationSpec spec(*config.theta, *config.phi);
    const auto outcomes = run_protocol(squeezed_resource(config.n_atoms, tau), spec);
    const auto errors = outcome_errors(outcomes, spec);
    Table table{{"k", "p", "sx", "sy", "sz", "e"}, {}, false};
    for (std::size_t k = 0; k < outcomes.size(); ++k) table.rows.push_back(outcome_row(outcomes[k], errors[k]));
    return table;
}

Table prob_dist_table(const ExperimentConfig& config, double tau) {
    const DiagonalPairState resource = squeezed_resource(config.n_atoms, tau);
    Table table{{"theta", "k", "p"}, {}, false};
    table.rows = sweep(theta_axis(config), {0.0}, [&](double theta, double) {
        const RealVector p = outcome_probabilities(resource, theta);
        std::vector<Row> rows;
        for (int k = 0; k <= config.n_atoms; ++k) rows.push_back({real(theta), integer(k), real(p(k))});
        return rows;
    });
    return table;
}

Table spin_sweep_table(const ExperimentConfig& config, double tau) {
    const DiagonalPairState resource = squeezed_resource(config.n_atoms, tau);
    Table table{{"theta", "phi", "k", "p", "sx", "sy", "sz", "e"}, {}, false};
    ExperimentConfig grid_config = config;
    grid_config.theta.reset();
    table.rows = sweep(theta_axis(grid_config), phi_axis(config), [&](double theta, double phi) {
        const RotationSpec spec(theta, phi);
        const auto outcomes = run_protocol(resource, spec);
        const auto errors = outcome_errors(outcomes, spec);
        std::vector<Row> rows;
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            if (config.k && static_cast<int>(k) != *config.k) continue;
            Row row{real(theta), real(phi)};
            const Row tail = outcome_row(outcomes[k], errors[k]);
            row.insert(row.end(), tail.begin(), tail.end());
            rows.push_back(std::move(row));
        }
        return rows;
    });
    return table;
}

Table wigner_table(const ExperimentConfig& config, double tau) {
    const int n = config.n_atoms;
    const RotationSpec spec(*config.theta, *config.phi);
    std::optional<EnsembleState> bob;
    if (config.source == WignerSource::kIdeal) {
        bob = ideal_outcome(n, *config.k, spec).bob_state;
    } else {
        const auto outcomes = run_protocol(squeezed_resource(n, tau), spec);
        const auto& outcome = outcomes[static_cast<std::size_t>(*config.k)];
        if (!outcome.defined()) {
            throw NumericalError("outcome k = " + std::to_string(*config.k) + " has zero probability");
        }
        bob = outcome.bob_state;
    }
    const SphereMap map = wigner_map(AngularState::from_pure(*bob),
                                     SphereGrid::uniform(config.grid.n_theta, config.grid.n_phi));
    Table table{{"theta", "phi", "w"}, {}, false};
    for (std::size_t i = 0; i < map.theta_nodes.size(); ++i) {
        for (std::size_t j = 0; j < map.phi_nodes.size(); ++j) {
            table.rows.push_back({real(map.theta_nodes[i]), real(map.phi_nodes[j]),
                                  real(map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
        }
    }
    return table;
}

Table error_sweep_table(const ExperimentConfig& config, double tau) {
    const DiagonalPairState resource = squeezed_resource(config.n_atoms, tau);
    Table table{{"theta", "phi", "e_avg", "e_ps", "p_keep"}, {}, false};
    table.rows = sweep(theta_axis(config), phi_axis(config), [&](double theta, double phi) {
        const RotationSpec spec(theta, phi);
        const auto outcomes = run_protocol(resource, spec);
        Row row{real(theta), real(phi), real(average_error(outcomes, spec)), Cell{}, Cell{}};
        if (config.k_cut) {
            try {
                const PostSelectedError ps = postselected_error(outcomes, spec, *config.k_cut);
                row[3] = real(ps.error);
                row[4] = real(ps.keep_probability);
            } catch (const EmptyPostSelection&) {
                row[4] = real(0.0);
            }
        }
        return std::vector<Row>{row};
    });
    return table;
}

Table fluctuation_table(const ExperimentConfig& config, double tau) {
    const FluctuationEnsemble ensemble(*config.fluctuation, tau);
    Table table{{"theta", "phi", "sx", "sy", "sz", "skipped"}, {}, false};
    table.rows = sweep(theta_axis(config), {*config.phi}, [&](double theta, double phi) {
        const FluctuationResult r = ensemble.spin_averages(RotationSpec(theta, phi));
        return std::vector<Row>{
            {real(theta), real(phi), real(r.spins.x), real(r.spins.y), real(r.spins.z), integer(r.skipped_terms)}};
    });
    return table;
}

ExperimentResult dispatch(const ExperimentConfig& config) {
    switch (config.subcommand) {
        case Subcommand::kOptimalTime: {
            Table table = optimal_time_table(config);
            const double tau = std::get<double>(table.rows[0][1]);
            return {std::move(table), tau};
        }
        case Subcommand::kSqueeze:
            return {squeeze_table(config), std::nullopt};
        default:
            break;
    }
    const double tau = resolve_tau(config);
    switch (config.subcommand) {
        case Subcommand::kProtocol: return {protocol_table(config, tau), tau};
        case Subcommand::kProbDist: return {prob_dist_table(config, tau), tau};
        case Subcommand::kSpinSweep: return {spin_sweep_table(config, tau), tau};
        case Subcommand::kWignerMap: return {wigner_table(config, tau), tau};
        case Subcommand::kErrorSweep: return {error_sweep_table(config, tau), tau};
        case Subcommand::kFluctuation: return {fluctuation_table(config, tau), tau};
        default: break;
    }
    throw ContractError("unhandled subcommand");
}

std::optional<std::string> extract_config_path(std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    return path;
}

}  // namespace

std::string library_version() { return SPINRSP_VERSION; }

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const std::string name = subcommand_name(config.subcommand);
    try {
        return dispatch(config);
    } catch (const DomainError& e) {
        throw UsageError(name + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(name + ": " + e.what());
    }
}

std::string render_manifest(const RunManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["subcommand"] = manifest.subcommand;
    doc["version"] = manifest.version;
    doc["config"] = manifest.config;
    doc["tau"] = manifest.tau ? nlohmann::ordered_json(*manifest.tau) : nlohmann::ordered_json(nullptr);
    doc["wall_time_seconds"] = manifest.wall_time_seconds;
    auto outputs = nlohmann::ordered_json::array();
    for (const auto& out : manifest.outputs) outputs.push_back({{"path", out.path}, {"sha256", out.sha256}});
    doc["outputs"] = std::move(outputs);
    return doc.dump(1) + "\n";
}

RunManifest execute(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result = run_experiment(config);

    RunManifest manifest;
    manifest.subcommand = subcommand_name(config.subcommand);
    manifest.version = library_version();
    manifest.config = config.echo;
    manifest.tau = result.tau;
    manifest.outputs.push_back(write_output(result.table, config.format, config.output_path, manifest.subcommand));
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.output_path != "-") {
        write_file_atomic(config.output_path + ".manifest.json", render_manifest(manifest));
    }
    return manifest;
}

int run_main(const std::vector<std::string>& raw_args) {
    std::vector<std::string> args = raw_args;
    try {
        std::optional<std::string> contents;
        if (const auto path = extract_config_path(args)) {
            std::ifstream in(*path);
            if (!in) throw IoError("cannot read config file " + *path);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            contents = buffer.str();
        }
        execute(parse_config(args, contents));
        return kExitOk;
    } catch (const HelpRequested& help) {
        std::cout << help.what();
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace spinrsp::cli
