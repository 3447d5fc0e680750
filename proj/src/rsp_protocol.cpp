// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/rsp_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinrsp/errors.hpp"
#include "spinrsp/parallel.hpp"

namespace spinrsp {

namespace {

constexpr double kPi = std::numbers::pi;

// Alice measures in the basis U(theta, pi - phi)|k>.
ComplexMatrix alice_basis(int n_atoms, const RotationSpec& spec) {
    return rotation_matrix(n_atoms, RotationSpec(spec.theta(), kPi - spec.phi()));
}

}  // namespace

std::vector<ProtocolOutcome> run_protocol(const DiagonalPairState& resource, const RotationSpec& spec) {
    if (resource.frame() == PairFrame::kLab) {
        throw ContractError("run_protocol expects a frame-rotated 2A2S resource or the EPR state");
    }
    const int n = resource.n_atoms();
    const ComplexMatrix basis = alice_basis(n, spec);
    const ComplexVector correction = z_rotation_phases(n, kPi);
    const ComplexVector& psi = resource.psi();

    std::vector<ProtocolOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        ProtocolOutcome out;
        out.k = k;
        out.correction_applied = needs_correction(n, k);
        // <k|_A U^dagger sum psi_k'|k'>_A|k'>_B = sum psi_k' conj(U[k'][k]) |k'>_B
        ComplexVector bob = psi.cwiseProduct(basis.col(k).conjugate());
        if (out.correction_applied) bob = bob.cwiseProduct(correction);
        out.probability = bob.squaredNorm();
        if (out.probability >= kZeroProbability) {
            EnsembleState state(n, bob / std::sqrt(out.probability), true);
            out.bob_spins = spin_expectations(state);
            out.bob_state = std::move(state);
        } else {
            out.probability = 0.0;
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

RealVector outcome_probabilities(const DiagonalPairState& resource, double theta) {
    const int n = resource.n_atoms();
    // <k|exp(i Sy theta/2)|k'> = d(theta)[k'][k], real.
    const RealMatrix d = rotation_d_matrix(n, theta);
    const RealVector weights = resource.psi().cwiseAbs2();
    return d.cwiseAbs2().transpose() * weights;
}

double mean_outcome(const RealVector& probabilities) {
    if (std::abs(probabilities.sum() - 1.0) > 1e-8) {
        throw DomainError("probabilities sum to " + std::to_string(probabilities.sum()) + ", not 1");
    }
    double mean = 0.0;
    for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
        mean += static_cast<double>(k) * probabilities(k);
    }
    return mean;
}

IdealOutcome ideal_outcome(int n_atoms, int k, const RotationSpec& spec) {
    if (k < 0 || k > n_atoms) {
        throw DomainError("outcome " + std::to_string(k) + " outside [0, " + std::to_string(n_atoms) + "]");
    }
    const double phi = needs_correction(n_atoms, k) ? spec.phi() + kPi : spec.phi();
    EnsembleState state = rotated_fock_state(n_atoms, k, RotationSpec(spec.theta(), phi));
    const double length = std::abs(2.0 * k - n_atoms);
    const double st = std::sin(spec.theta());
    const SpinVector spins{length * st * std::cos(spec.phi()), length * st * std::sin(spec.phi()),
                           (2.0 * k - n_atoms) * std::cos(spec.theta())};
    return {k, std::move(state), spins};
}

std::optional<double> error_k(const ProtocolOutcome& outcome, const IdealOutcome& ideal, int n_atoms) {
    if (outcome.k != ideal.k) {
        throw DomainError("error_k: outcome k = " + std::to_string(outcome.k) + " but ideal k = " +
                          std::to_string(ideal.k));
    }
    if (ideal.bob_state.n_atoms() != n_atoms) {
        throw DomainError("error_k: ideal outcome has a different atom number");
    }
    if (!outcome.defined() || outcome.probability <= 0.0) return std::nullopt;
    return outcome.bob_spins.distance(ideal.bob_spins) / (2.0 * n_atoms);
}

std::vector<std::optional<double>> outcome_errors(const std::vector<ProtocolOutcome>& outcomes,
                                                  const RotationSpec& spec) {
    const int n = static_cast<int>(outcomes.size()) - 1;
    std::vector<std::optional<double>> errors;
    errors.reserve(outcomes.size());
    for (const auto& out : outcomes) {
        errors.push_back(out.defined() ? error_k(out, ideal_outcome(n, out.k, spec), n) : std::nullopt);
    }
    return errors;
}

double average_error(const std::vector<ProtocolOutcome>& outcomes, const RotationSpec& spec) {
    const auto errors = outcome_errors(outcomes, spec);
    double total = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        if (errors[k]) total += outcomes[k].probability * *errors[k];
    }
    return total;
}

double average_error(const DiagonalPairState& resource, const RotationSpec& spec) {
    return average_error(run_protocol(resource, spec), spec);
}

PostSelectedError postselected_error(const std::vector<ProtocolOutcome>& outcomes,
                                     const RotationSpec& spec, int k_cut) {
    const int n = static_cast<int>(outcomes.size()) - 1;
    if (k_cut < 0 || 2 * k_cut >= n) {
        throw DomainError("k_cut must satisfy 0 <= k_cut < N/2 (N = " + std::to_string(n) +
                          ", k_cut = " + std::to_string(k_cut) + ")");
    }
    const auto errors = outcome_errors(outcomes, spec);
    double kept = 0.0;
    double weighted = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (k > k_cut && k < n - k_cut) continue;
        const auto& out = outcomes[static_cast<std::size_t>(k)];
        kept += out.probability;
        if (errors[static_cast<std::size_t>(k)]) weighted += out.probability * *errors[static_cast<std::size_t>(k)];
    }
    if (kept < kZeroProbability) {
        throw EmptyPostSelection("post-selection with k_cut = " + std::to_string(k_cut) +
                                 " keeps no probability");
    }
    return {weighted / kept, kept};
}

PostSelectedError postselected_error(const DiagonalPairState& resource, const RotationSpec& spec,
                                     int k_cut) {
    return postselected_error(run_protocol(resource, spec), spec, k_cut);
}

AtomNumberWeights atom_number_weights(const FluctuationSpec& spec) {
    if (!(spec.sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
    if (!(spec.truncation > 0.0)) throw DomainError("truncation must be positive");
    if (!(spec.mean_atoms >= 1.0)) throw DomainError("mean atom number must be >= 1");

    const double half_width = spec.truncation * spec.sigma0;
    int lo = std::max(1, static_cast<int>(std::ceil(spec.mean_atoms - half_width)));
    int hi = static_cast<int>(std::floor(spec.mean_atoms + half_width));
    if (hi < lo) {
        lo = hi = std::max(1, static_cast<int>(std::lround(spec.mean_atoms)));
    }
    AtomNumberWeights out;
    double total = 0.0;
    for (int n = lo; n <= hi; ++n) {
        const double x = (n - spec.mean_atoms) / spec.sigma0;
        const double w = std::exp(-0.5 * x * x);
        out.atoms.push_back(n);
        out.weights.push_back(w);
        total += w;
    }
    for (double& w : out.weights) w /= total;
    return out;
}

FluctuationEnsemble::FluctuationEnsemble(const FluctuationSpec& spec, double tau)
    : spec_(spec), weights_(atom_number_weights(spec)) {
    if (spec.rule == OutcomeRule::kFixed && spec.fixed_k < 0) {
        throw DomainError("fixed outcome must be non-negative");
    }
    const std::size_t m = weights_.atoms.size();
    pairs_.resize(m * m);
    parallel_for(m * m, [&](std::size_t idx) {
        pairs_[idx] = evolve_2a2s_offset(weights_.atoms[idx / m], weights_.atoms[idx % m], tau, true);
    });
}

FluctuationResult FluctuationEnsemble::spin_averages(const RotationSpec& spec) const {
    const std::size_t m = weights_.atoms.size();
    struct RowSum {
        SpinVector spins;
        double weight = 0.0;
        int skipped = 0;
    };
    std::vector<RowSum> rows(m);

    parallel_for(m, [&](std::size_t a) {
        const int n_a = weights_.atoms[a];
        RowSum& row = rows[a];
        int k = 0;
        switch (spec_.rule) {
            case OutcomeRule::kExtremalHigh: k = n_a; break;
            case OutcomeRule::kExtremalLow: k = 0; break;
            case OutcomeRule::kFixed: k = spec_.fixed_k; break;
        }
        if (k > n_a) {
            row.skipped = static_cast<int>(m);
            return;
        }
        const ComplexMatrix basis = alice_basis(n_a, spec);
        for (std::size_t b = 0; b < m; ++b) {
            const OffsetPairState& pair = pairs_[a * m + b];
            const int n_b = pair.n_b;
            ComplexVector bob = ComplexVector::Zero(n_b + 1);
            for (Eigen::Index j = 0; j < pair.amplitudes.size(); ++j) {
                const auto ka = static_cast<Eigen::Index>(n_a) - j;
                const auto kb = static_cast<Eigen::Index>(n_b) - j;
                bob(kb) = pair.amplitudes(j) * std::conj(basis(ka, k));
            }
            if (needs_correction(n_a, k)) bob = bob.cwiseProduct(z_rotation_phases(n_b, kPi));
            if (bob.squaredNorm() < kZeroProbability) {
                ++row.skipped;
                continue;
            }
            const double w = weights_.weights[a] * weights_.weights[b];
            const SpinVector s = spin_expectations(EnsembleState(n_b, bob)).scaled(w / n_b);
            row.spins = {row.spins.x + s.x, row.spins.y + s.y, row.spins.z + s.z};
            row.weight += w;
        }
    });

    FluctuationResult result;
    for (const RowSum& row : rows) {
        result.spins = {result.spins.x + row.spins.x, result.spins.y + row.spins.y,
                        result.spins.z + row.spins.z};
        result.included_weight += row.weight;
        result.skipped_terms += row.skipped;
    }
    if (result.included_weight <= 0.0) {
        throw NumericalError("every (N_A, N_B) term was skipped; no spin average is defined");
    }
    result.spins = result.spins.scaled(1.0 / result.included_weight);
    return result;
}

FluctuationResult fluctuating_spin_averages(const FluctuationSpec& fspec, const RotationSpec& spec,
                                            double tau) {
    return FluctuationEnsemble(fspec, tau).spin_averages(spec);
}

}  // namespace spinrsp
