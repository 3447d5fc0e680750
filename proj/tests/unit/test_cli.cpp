// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "spinrsp/cli/config.hpp"
#include "spinrsp/cli/execute.hpp"
#include "spinrsp/cli/output.hpp"

namespace {

using namespace spinrsp::cli;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

std::vector<std::string> split(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string token; in >> token;) out.push_back(token);
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("spinrsp_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ignored;
        fs::remove_all(path_, ignored);
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

TEST(ParseConfig, MinimalOptimalTime) {
    const ExperimentConfig c = parse_config({"optimal-time", "--n", "20"});
    EXPECT_EQ(c.subcommand, Subcommand::kOptimalTime);
    EXPECT_EQ(c.n_atoms, 20);
    EXPECT_EQ(c.format, OutputFormat::kJson);
    EXPECT_FALSE(c.tau.has_value());
}

TEST(ParseConfig, AnglesAcceptPiPrefix) {
    const ExperimentConfig c = parse_config({"prob-dist", "--n", "20", "--theta", "pi:0.5"});
    EXPECT_DOUBLE_EQ(*c.theta, kPi / 2);
    EXPECT_DOUBLE_EQ(parse_angle("-0.25", "phi"), -0.25);
    EXPECT_DOUBLE_EQ(parse_angle("pi:-0.25", "phi"), -kPi / 4);
    EXPECT_THROW(parse_angle("pi:abc", "phi"), UsageError);
}

TEST(ParseConfig, UsageErrors) {
    EXPECT_THROW(parse_config({"error-sweep", "--n", "20", "--k-cut", "30"}), UsageError);
    EXPECT_THROW(parse_config({"error-sweep", "--n", "20", "--k-cut", "10"}), UsageError);
    EXPECT_NO_THROW(parse_config({"error-sweep", "--n", "20", "--k-cut", "9"}));
    EXPECT_THROW(parse_config({"optimal-time", "--n", "20", "--theta", "1"}), UsageError);
    EXPECT_THROW(parse_config({"optimal-time", "--n", "abc"}), UsageError);
    EXPECT_THROW(parse_config({"optimal-time", "--n", "1"}), UsageError);
    EXPECT_THROW(parse_config({"protocol", "--n", "5", "--theta", "1"}), UsageError);
    EXPECT_THROW(parse_config({"protocol", "--n", "5", "--theta", "1", "--phi", "0", "--bogus", "1"}), UsageError);
    EXPECT_THROW(parse_config({"nonsense"}), UsageError);
    EXPECT_THROW(parse_config({}), UsageError);
    EXPECT_THROW(parse_config({"squeeze", "--n", "4", "--format", "xml"}), UsageError);
    EXPECT_THROW(parse_config({"fluctuation", "--n", "20", "--rule", "fixed"}), UsageError);
    EXPECT_THROW(parse_config({"optimal-time", "--help"}), HelpRequested);
    try {
        parse_config({"optimal-time", "--n", "20", "--theta", "1"});
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("--theta"), std::string::npos);
    }
}

TEST(ParseConfig, ConfigFileMergesUnderFlags) {
    const std::string file = "# sweep defaults\nn = 12\nn-theta=5\nphi = pi:0.5\n";
    const ExperimentConfig c = parse_config({"spin-sweep", "--n", "8"}, file);
    EXPECT_EQ(c.n_atoms, 8);
    EXPECT_EQ(c.grid.n_theta, 5);
    EXPECT_DOUBLE_EQ(*c.phi, kPi / 2);
    EXPECT_EQ(c.echo.at("n"), "8");
    EXPECT_THROW(parse_config({"optimal-time"}, "n=10\ntheta=1\n"), UsageError);
    EXPECT_THROW(parse_config({"optimal-time"}, "n 10\n"), UsageError);
    EXPECT_EQ(parse_config({"optimal-time"}, "n=10\n").n_atoms, 10);
}

TEST(ParseConfig, FluctuationDefaults) {
    const ExperimentConfig c = parse_config({"fluctuation", "--n", "20"});
    ASSERT_TRUE(c.fluctuation.has_value());
    EXPECT_NEAR(c.fluctuation->sigma0, 2.0 * std::sqrt(20.0), 1e-15);
    EXPECT_DOUBLE_EQ(c.fluctuation->truncation, 4.0);
    EXPECT_EQ(c.fluctuation->rule, spinrsp::OutcomeRule::kExtremalHigh);
    EXPECT_DOUBLE_EQ(*c.phi, -kPi / 4);
}

TEST(Output, RealFormatting) {
    EXPECT_EQ(format_real(0.1214488389823), "0.121448838982");
    EXPECT_EQ(format_real(-0.0), "0");
    EXPECT_EQ(format_real(20.0), "20");
}

TEST(Output, HeadersFollowSchema) {
    const auto header = [](const std::vector<std::string>& args) {
        const std::string csv = render_csv(run_experiment(parse_config(args)).table);
        return csv.substr(0, csv.find('\n'));
    };
    EXPECT_EQ(header({"spin-sweep", "--n", "3", "--n-theta", "3", "--n-phi", "2"}), "theta,phi,k,p,sx,sy,sz,e");
    EXPECT_EQ(header({"wigner-map", "--n", "3", "--theta", "0.5", "--phi", "0", "--k", "3", "--n-theta", "5",
                      "--n-phi", "4"}),
              "theta,phi,w");
    EXPECT_EQ(header({"protocol", "--n", "3", "--theta", "0.5", "--phi", "0"}), "k,p,sx,sy,sz,e");
    EXPECT_EQ(header({"prob-dist", "--n", "3", "--n-theta", "3"}), "theta,k,p");
    EXPECT_EQ(header({"squeeze", "--n", "3", "--steps", "2"}), "tau,fidelity,var_xp,var_ym,var_zm");
    EXPECT_EQ(header({"error-sweep", "--n", "3", "--n-theta", "3", "--n-phi", "2"}), "theta,phi,e_avg,e_ps,p_keep");
    EXPECT_EQ(header({"fluctuation", "--n", "6", "--n-theta", "3"}), "theta,phi,sx,sy,sz,skipped");
}

TEST(Execute, OptimalTimeJson) {
    const ExperimentResult r = run_experiment(parse_config({"optimal-time", "--n", "20"}));
    const auto doc = nlohmann::json::parse(render_json(r.table, "optimal-time"));
    EXPECT_EQ(doc.at("n").get<int>(), 20);
    EXPECT_NEAR(doc.at("tau_opt").get<double>(), 0.1214, 5e-4);
    EXPECT_GT(doc.at("fidelity").get<double>(), 0.9);
}

TEST(Execute, ProbabilitiesSumToOneAtEquator) {
    const ExperimentResult r = run_experiment(parse_config({"prob-dist", "--n", "20"}));
    double total = 0.0;
    for (const auto& row : r.table.rows) {
        if (std::abs(std::get<double>(row[0]) - kPi / 2) < 1e-12) total += std::get<double>(row[2]);
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    ASSERT_TRUE(r.tau.has_value());
}

TEST(Execute, ErrorSweepWithinRange) {
    const ExperimentResult r =
        run_experiment(parse_config({"error-sweep", "--n", "20", "--n-theta", "13", "--n-phi", "13"}));
    EXPECT_EQ(r.table.rows.size(), 169u);
    for (const auto& row : r.table.rows) {
        const double e = std::get<double>(row[2]);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
}

TEST(Execute, FilesAreDeterministicWithManifest) {
    TempDir dir;
    const std::vector<std::string> base = {"spin-sweep", "--n", "6", "--n-theta", "7", "--n-phi", "5"};
    std::vector<std::string> first = base;
    first.insert(first.end(), {"--output", dir.file("a.csv")});
    std::vector<std::string> second = base;
    second.insert(second.end(), {"--output", dir.file("b.csv")});
    const RunManifest m1 = execute(parse_config(first));
    const RunManifest m2 = execute(parse_config(second));
    EXPECT_EQ(m1.outputs.at(0).sha256, m2.outputs.at(0).sha256);
    EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
    EXPECT_EQ(sha256_hex(slurp(dir.file("a.csv"))), m1.outputs.at(0).sha256);
    const auto manifest = nlohmann::json::parse(slurp(dir.file("a.csv.manifest.json")));
    EXPECT_EQ(manifest.at("subcommand"), "spin-sweep");
    EXPECT_EQ(manifest.at("config").at("n"), "6");
    EXPECT_TRUE(manifest.at("tau").is_number());
    EXPECT_FALSE(fs::exists(dir.file("a.csv.partial")));
}

TEST(Execute, UnwritablePathIsIoError) {
    const ExperimentConfig c = parse_config({"optimal-time", "--n", "4", "--output", "/nonexistent-dir/out.json"});
    EXPECT_THROW(execute(c), IoError);
    EXPECT_EQ(run_main({"optimal-time", "--n", "4", "--output", "/nonexistent-dir/out.json"}), kExitIo);
    EXPECT_EQ(run_main({"optimal-time", "--n", "x"}), kExitUsage);
    EXPECT_EQ(run_main({"optimal-time", "--config", "/nonexistent-dir/cfg"}), kExitIo);
}

TEST(Execute, ZeroProbabilityWignerIsNumericalError) {
    // Unentangled resource at the north pole leaves only k = N populated.
    EXPECT_EQ(run_main({"wigner-map", "--n", "4", "--tau", "0", "--theta", "0", "--phi", "0", "--k", "1",
                        "--n-theta", "5", "--n-phi", "4"}),
              kExitNumerical);
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

TEST(Golden, FigureFixturesRegenerate) {
    const fs::path dir = SPINRSP_GOLDEN_DIR;
    std::ifstream cases(dir / "cases.txt");
    ASSERT_TRUE(cases.good());
    int checked = 0;
    for (std::string line; std::getline(cases, line);) {
        if (line.empty() || line[0] == '#') continue;
        const auto bar = line.find('|');
        std::string name = line.substr(0, bar);
        name.erase(name.find_last_not_of(' ') + 1);
        const auto expected = read_csv(slurp(dir / name));
        const auto actual = read_csv(render_csv(run_experiment(parse_config(split(line.substr(bar + 1)))).table));
        ASSERT_EQ(expected.size(), actual.size()) << name;
        EXPECT_EQ(expected[0], actual[0]) << name;
        for (std::size_t r = 1; r < expected.size(); ++r) {
            ASSERT_EQ(expected[r].size(), actual[r].size()) << name << " row " << r;
            for (std::size_t c = 0; c < expected[r].size(); ++c) {
                if (expected[r][c].empty()) {
                    EXPECT_TRUE(actual[r][c].empty());
                    continue;
                }
                EXPECT_NEAR(std::stod(actual[r][c]), std::stod(expected[r][c]), 1e-9)
                    << name << " row " << r << " col " << c;
            }
        }
        ++checked;
    }
    EXPECT_EQ(checked, 6);
}

}  // namespace
