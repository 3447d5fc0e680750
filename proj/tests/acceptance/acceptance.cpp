// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "spinrsp/rsp_protocol.hpp"
#include "spinrsp/squeezing.hpp"
#include "spinrsp/wigner.hpp"

namespace {

using namespace spinrsp;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass;
    std::string detail;
};

DiagonalPairState squeezed(int n, double tau) { return apply_frame_rotation(evolve_2a2s(n, tau)); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Verdict optimal_time() {
    const double budget = 10.0;
    std::string detail;
    bool pass = true;
    for (auto [n, target] : {std::pair{20, 0.1214}, std::pair{50, 0.0586}}) {
        const auto start = std::chrono::steady_clock::now();
        const double tau = find_optimal_time(n).tau;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        pass = pass && std::abs(tau - target) <= 5e-4 && secs < budget;
        detail += "tau_opt(" + std::to_string(n) + ")=" + fmt(tau) + " ";
    }
    return {pass, detail + "(tol 5e-4)"};
}

Verdict ideal_exactness() {
    double spin_dev = 0.0, prob_dev = 0.0;
    for (int n = 1; n <= 12; ++n) {
        for (int i = 0; i < 13; ++i) {
            for (int j = 0; j < 13; ++j) {
                const RotationSpec spec(kPi * i / 12, 2 * kPi * j / 13);
                for (const auto& o : run_protocol(epr_minus(n), spec)) {
                    prob_dev = std::max(prob_dev, std::abs(o.probability - 1.0 / (n + 1)));
                    spin_dev = std::max(spin_dev, o.bob_spins.distance(ideal_outcome(n, o.k, spec).bob_spins));
                }
            }
        }
    }
    return {spin_dev < 1e-9 && prob_dev < 1e-12,
            "max spin dev " + fmt(spin_dev) + " (tol 1e-9), max |P_k - 1/(N+1)| " + fmt(prob_dev) + " (tol 1e-12)"};
}

Verdict oracle_equivalence() {
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (double tau : {0.0, 0.07, find_optimal_time(std::max(n, 2)).tau, 0.5}) {
            const ComplexVector joint = oracle::joint_2a2s(n, n, tau, true);
            const DiagonalPairState s = squeezed(n, tau);
            for (int ka = 0; ka <= n; ++ka) {
                for (int kb = 0; kb <= n; ++kb) {
                    const Complex ours = ka == kb ? s.psi()(ka) : Complex{};
                    worst = std::max(worst, std::abs(ours - joint(oracle::joint(n, ka, kb))));
                }
            }
            for (double theta : {0.0, 0.6, kPi / 2, 2.2, kPi}) {
                for (double phi : {0.0, 1.1, 3.7}) {
                    const auto ref = oracle::joint_protocol(joint, n, theta, phi);
                    const auto outcomes = run_protocol(s, RotationSpec(theta, phi));
                    for (int k = 0; k <= n; ++k) {
                        const auto& o = outcomes[static_cast<std::size_t>(k)];
                        worst = std::max(worst, std::abs(o.probability - ref[k].probability));
                        if (o.defined() && ref[k].bob.size() > 0) {
                            // Conditional states are rays; remove the global phase before comparing.
                            const Complex overlap = ref[k].bob.dot(o.bob_state->amplitudes());
                            const ComplexVector aligned = ref[k].bob * (overlap / std::abs(overlap));
                            worst = std::max(worst, (o.bob_state->amplitudes() - aligned).cwiseAbs().maxCoeff());
                        } else if (o.defined() != (ref[k].bob.size() > 0)) {
                            worst = std::max(worst, 1.0);
                        }
                    }
                }
            }
        }
    }
    return {worst < 1e-10, "max deviation from joint-space simulation " + fmt(worst) + " (tol 1e-10)"};
}

Verdict probability_symmetry() {
    const int n = 20;
    const DiagonalPairState s = squeezed(n, find_optimal_time(n).tau);
    double mirror = 0.0, phase = 0.0;
    for (int i = 0; i <= 24; ++i) {
        const double theta = kPi * i / 24;
        const RealVector p = outcome_probabilities(s, theta);
        const RealVector q = outcome_probabilities(s, kPi - theta);
        for (int k = 0; k <= n; ++k) mirror = std::max(mirror, std::abs(p(k) - q(n - k)));
        RealVector lo = RealVector::Constant(n + 1, 2.0), hi = RealVector::Constant(n + 1, -1.0);
        for (int j = 0; j < 32; ++j) {
            RealVector pj(n + 1);
            for (const auto& o : run_protocol(s, RotationSpec(theta, 2 * kPi * j / 32))) pj(o.k) = o.probability;
            lo = lo.cwiseMin(pj);
            hi = hi.cwiseMax(pj);
        }
        phase = std::max(phase, (hi - lo).maxCoeff());
    }
    return {mirror < 1e-10 && phase < 1e-10,
            "max |P_k(t) - P_N-k(pi-t)| " + fmt(mirror) + ", max phi variation " + fmt(phase) + " (tol 1e-10)"};
}

Verdict squeezing_variances() {
    double zm = 0.0;
    for (int n : {5, 20, 50}) {
        for (int i = 0; i <= 100; ++i) {
            zm = std::max(zm, std::abs(pair_variances(make_squeezing_run(n, 0.02 * i)).var_zm));
        }
    }
    const int n = 50;
    const double ratio = pair_variances(make_squeezing_run(n, 0.01)).var_xp / (2.0 * n * std::exp(-2.0 * n * 0.01));
    return {zm < 1e-10 && ratio >= 0.85 && ratio <= 1.15,
            "max Var(Sz_A - Sz_B) " + fmt(zm) + " (tol 1e-10), short-time ratio " + fmt(ratio) + " (in [0.85, 1.15])"};
}

Verdict error_trends() {
    const RotationSpec spec(kPi / 2, 0.0);
    double previous = 2.0;
    bool decreasing = true, below = true;
    std::string detail = "E(pi/2,0):";
    for (int n = 10; n <= 50; n += 10) {
        const auto outcomes = run_protocol(squeezed(n, find_optimal_time(n).tau), spec);
        const double e = average_error(outcomes, spec);
        const double ps = postselected_error(outcomes, spec, 0).error;
        decreasing = decreasing && e < previous;
        below = below && ps < e;
        previous = e;
        detail += " " + fmt(e) + "/" + fmt(ps);
    }
    return {decreasing && below, detail + " (no-PS/k_cut=0)"};
}

Verdict wigner_checks() {
    const int n = 20;
    const auto outcomes = run_protocol(squeezed(n, find_optimal_time(n).tau), RotationSpec(0.5, 0.0));
    const SphereGrid quad = SphereGrid::gauss_legendre(2 * n + 2, 4 * n + 2);
    const double target = std::sqrt(4.0 * kPi / (n + 1));
    double norm_dev = 0.0;
    for (const auto& o : outcomes) {
        if (!o.defined()) continue;
        norm_dev = std::max(norm_dev, std::abs(wigner_map(AngularState::from_pure(*o.bob_state), quad).integral() - target));
    }
    const SphereGrid plot = SphereGrid::uniform(121, 241);
    const double min_top = wigner_map(AngularState::from_pure(*outcomes[20].bob_state), plot).min_value();
    const double min_next = wigner_map(AngularState::from_pure(*outcomes[19].bob_state), plot).min_value();
    return {norm_dev < 1e-6 && min_next < 0.0 && min_top > min_next,
            "max |int W - sqrt(4pi/(N+1))| " + fmt(norm_dev) + " (tol 1e-6), min W k=N-1 " + fmt(min_next) +
                ", k=N " + fmt(min_top)};
}

Verdict fluctuation_robustness() {
    const int n = 20;
    FluctuationSpec spec;
    spec.mean_atoms = n;
    spec.sigma0 = 2.0 * std::sqrt(20.0);
    spec.rule = OutcomeRule::kExtremalHigh;
    const FluctuationEnsemble ensemble(spec, find_optimal_time(n).tau);
    const double phi = -kPi / 4;
    double worst = 0.0, worst_theta = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double theta = kPi * i / 60;
        const SpinVector s = ensemble.spin_averages(RotationSpec(theta, phi)).spins;
        const double dev = std::max({std::abs(s.x - std::sin(theta) * std::cos(phi)),
                                     std::abs(s.y - std::sin(theta) * std::sin(phi)),
                                     std::abs(s.z - std::cos(theta))});
        if (dev > worst) {
            worst = dev;
            worst_theta = theta;
        }
    }
    return {worst < 0.15, "max |<s>_fluct - ideal| " + fmt(worst) + " at theta " + fmt(worst_theta) + " (tol 0.15)"};
}

Verdict determinism(const std::string& tool) {
    if (tool.empty()) return {false, "no --tool given"};
    const fs::path dir = fs::temp_directory_path() / ("spinrsp_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> runs = {
        "optimal-time --n 12",
        "squeeze --n 12 --steps 50",
        "protocol --n 12 --theta pi:0.3 --phi 0.4",
        "prob-dist --n 12 --n-theta 13",
        "spin-sweep --n 8 --n-theta 9 --n-phi 9",
        "wigner-map --n 8 --theta 0.5 --phi 0 --k 7 --n-theta 31 --n-phi 61",
        "error-sweep --n 8 --k-cut 1 --n-theta 9 --n-phi 9",
        "fluctuation --n 10 --n-theta 13",
    };
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    bool pass = true;
    std::string failed;
    int index = 0;
    for (const auto& args : runs) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / ("run" + std::to_string(index) + "_" + std::to_string(rep));
            const std::string cmd = "\"" + tool + "\" " + args + " --output \"" + out.string() + "\"";
            if (std::system(cmd.c_str()) != 0) {
                pass = false;
                failed += " [" + args + ": exit]";
            }
            outputs[rep] = slurp(out);
        }
        if (outputs[0].empty() || outputs[0] != outputs[1]) {
            pass = false;
            failed += " [" + args + "]";
        }
        ++index;
    }
    std::error_code ignored;
    fs::remove_all(dir, ignored);
    return {pass, std::to_string(runs.size()) + " subcommands run twice" +
                      (failed.empty() ? ", outputs byte-identical" : ", differing:" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
    std::string tool;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--tool") tool = argv[i + 1];
    }
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"optimal squeezing time", optimal_time},
        {"ideal-protocol exactness", ideal_exactness},
        {"oracle equivalence", oracle_equivalence},
        {"probability symmetry and phi-independence", probability_symmetry},
        {"squeezing variances", squeezing_variances},
        {"error trends", error_trends},
        {"Wigner normalization and negativity", wigner_checks},
        {"fluctuation robustness", fluctuation_robustness},
        {"determinism", [&] { return determinism(tool); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failures;
        std::printf("%s criterion %zu (%s): %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
